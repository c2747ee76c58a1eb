// Copyright 2026 The pgpfwd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pgpfwd/armor.hpp"

#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "pgpfwd/errors.hpp"
#include "test_support.hpp"

namespace pgpfwd {
namespace {

using testing_support::random_vector;

// Bit-at-a-time CRC24, straight from the polynomial definition.
std::uint32_t crc24_bitwise(ByteView data) {
  std::uint32_t crc = 0xB704CE;
  for (std::uint8_t byte : data) {
    crc ^= static_cast<std::uint32_t>(byte) << 16;
    for (int i = 0; i < 8; ++i) {
      crc <<= 1;
      if (crc & 0x1000000) crc ^= 0x1864CFB;
    }
  }
  return crc & 0xFFFFFF;
}

ErrorCode dearmor_error(const std::string& text) {
  try {
    dearmor(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "dearmor accepted:\n" << text;
  return ErrorCode::kInvalidArgument;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(Crc24, KnownValues) {
  EXPECT_EQ(crc24({}), 0xB704CEu);
  EXPECT_EQ(crc24(as_bytes("123456789")), 0x21CF02u);
}

TEST(Crc24, MatchesBitwiseOracle) {
  std::mt19937_64 rng(30);
  for (int i = 0; i < 1000; ++i) {
    Bytes data = random_vector(rng, rng() % 300);
    ASSERT_EQ(crc24(data), crc24_bitwise(data));
  }
}

TEST(Armor, EmptyPayload) {
  std::string text = armor({}, kArmorMessage);
  EXPECT_EQ(text,
            "-----BEGIN PGP MESSAGE-----\n\n=twTO\n-----END PGP MESSAGE-----\n");
  ArmoredMessage m = dearmor(text);
  EXPECT_EQ(m.label, kArmorMessage);
  EXPECT_TRUE(m.data.empty());
}

TEST(Armor, RoundTripOneKiB) {
  std::mt19937_64 rng(31);
  Bytes data = random_vector(rng, 1024);
  std::string text = armor(data, kArmorMessage);
  EXPECT_EQ(dearmor(text).data, data);
}

TEST(Armor, RoundTripRandomSizesAndLabels) {
  std::mt19937_64 rng(32);
  const std::string_view labels[] = {kArmorMessage, kArmorPublicKey,
                                     kArmorPrivateKey};
  for (int i = 0; i < 1000; ++i) {
    Bytes data = random_vector(rng, rng() % 700);
    auto label = labels[rng() % 3];
    ArmoredMessage m = dearmor(armor(data, label));
    ASSERT_EQ(m.data, data);
    ASSERT_EQ(m.label, label);
  }
}

TEST(Armor, LinesAtMostSixtyFourColumns) {
  std::mt19937_64 rng(33);
  for (std::size_t n : {47u, 48u, 49u, 96u, 1000u}) {
    for (const auto& line : split_lines(armor(random_vector(rng, n),
                                              kArmorMessage))) {
      if (line.rfind("-----", 0) == 0) continue;
      EXPECT_LE(line.size(), kArmorLineWidth);
    }
  }
}

TEST(Armor, HeadersPreserved) {
  std::vector<std::pair<std::string, std::string>> headers = {
      {"Comment", "forwarded"}, {"Version", "pgpfwd"}};
  std::string text = armor(as_bytes("hi"), kArmorMessage, headers);
  ArmoredMessage m = dearmor(text);
  EXPECT_EQ(m.headers, headers);
  EXPECT_EQ(to_string(m.data), "hi");
}

TEST(Armor, AcceptsCrlf) {
  std::string text = armor(as_bytes("crlf payload"), kArmorMessage);
  std::string crlf;
  for (char c : text) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  EXPECT_EQ(to_string(dearmor(crlf).data), "crlf payload");
}

TEST(Armor, CorruptedBodyIsChecksumMismatch) {
  std::mt19937_64 rng(34);
  Bytes data = random_vector(rng, 1024);
  std::string text = armor(data, kArmorMessage);
  auto lines = split_lines(text);
  // Swap one base64 character on the first body line for a different one.
  std::string& body = lines[2];
  body[10] = body[10] == 'A' ? 'B' : 'A';
  std::string joined;
  for (const auto& l : lines) joined += l + "\n";
  EXPECT_EQ(dearmor_error(joined), ErrorCode::kChecksumMismatch);
}

TEST(Armor, FramingErrors) {
  const std::string good = armor(as_bytes("payload"), kArmorMessage);
  EXPECT_EQ(dearmor_error(""), ErrorCode::kBadFraming);
  EXPECT_EQ(dearmor_error("hello\n"), ErrorCode::kBadFraming);

  std::string mismatched = good;
  mismatched.replace(mismatched.find("END PGP MESSAGE"), 15,
                     "END PGP SIGNATURE");
  EXPECT_EQ(dearmor_error(mismatched), ErrorCode::kBadFraming);

  std::string no_end = good.substr(0, good.find("-----END"));
  EXPECT_EQ(dearmor_error(no_end), ErrorCode::kBadFraming);

  std::string no_crc = good;
  auto eq = no_crc.find("\n=");
  auto eol = no_crc.find('\n', eq + 1);
  no_crc.erase(eq, eol - eq);
  EXPECT_EQ(dearmor_error(no_crc), ErrorCode::kBadFraming);

  std::string bad_char = good;
  bad_char[bad_char.find("\n\n") + 2] = '*';
  EXPECT_EQ(dearmor_error(bad_char), ErrorCode::kBadFraming);

  EXPECT_EQ(dearmor_error(good + "trailing\n"), ErrorCode::kBadFraming);
}

TEST(Armor, FuzzNeverCrashes) {
  std::mt19937_64 rng(35);
  const std::string good = armor(random_vector(rng, 200), kArmorMessage);
  for (int i = 0; i < 5000; ++i) {
    std::string text = good;
    int edits = 1 + static_cast<int>(rng() % 3);
    for (int e = 0; e < edits && !text.empty(); ++e) {
      std::size_t pos = rng() % text.size();
      switch (rng() % 3) {
        case 0:
          text[pos] = static_cast<char>(rng());
          break;
        case 1:
          text.erase(pos, 1 + rng() % 8);
          break;
        default:
          text.insert(pos, 1, static_cast<char>(rng()));
      }
    }
    try {
      dearmor(text);
    } catch (const Error&) {
    } catch (const std::exception& e) {
      FAIL() << "unexpected exception " << e.what();
    }
  }
}

}  // namespace
}  // namespace pgpfwd
