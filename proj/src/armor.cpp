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

#include <array>
#include <sstream>

#include <openssl/evp.h>

#include "pgpfwd/errors.hpp"

namespace pgpfwd {

namespace {

constexpr std::uint32_t kCrc24Init = 0xB704CE;
constexpr std::uint32_t kCrc24Poly = 0x864CFB;

constexpr std::array<std::uint32_t, 256> make_crc24_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t crc = i << 16;
    for (int bit = 0; bit < 8; ++bit) {
      crc <<= 1;
      if (crc & 0x1000000) crc ^= kCrc24Poly | 0x1000000;
    }
    table[i] = crc & 0xFFFFFF;
  }
  return table;
}

constexpr auto kCrc24Table = make_crc24_table();

std::string base64_encode(ByteView data) {
  if (data.empty()) return {};
  std::string out(4 * ((data.size() + 2) / 3), '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                          data.data(), static_cast<int>(data.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

Bytes base64_decode(std::string_view text) {
  if (text.empty()) return {};
  if (text.size() % 4 != 0) {
    throw Error(ErrorCode::kBadFraming, "base64 length not a multiple of 4");
  }
  std::size_t pad = 0;
  if (text.back() == '=') ++pad;
  if (text.size() >= 2 && text[text.size() - 2] == '=') ++pad;
  for (std::size_t i = 0; i < text.size() - pad; ++i) {
    char c = text[i];
    bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
              (c >= '0' && c <= '9') || c == '+' || c == '/';
    if (!ok) throw Error(ErrorCode::kBadFraming, "invalid base64 character");
  }
  Bytes out(3 * (text.size() / 4));
  int n = EVP_DecodeBlock(out.data(),
                          reinterpret_cast<const unsigned char*>(text.data()),
                          static_cast<int>(text.size()));
  if (n < 0) throw Error(ErrorCode::kBadFraming, "invalid base64");
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

constexpr std::string_view kBegin = "-----BEGIN ";
constexpr std::string_view kEnd = "-----END ";
constexpr std::string_view kDashes = "-----";

}  // namespace

std::uint32_t crc24(ByteView data) {
  std::uint32_t crc = kCrc24Init;
  for (std::uint8_t b : data) {
    crc = ((crc << 8) ^ kCrc24Table[((crc >> 16) ^ b) & 0xff]) & 0xFFFFFF;
  }
  return crc;
}

std::string armor(
    ByteView data, std::string_view label,
    const std::vector<std::pair<std::string, std::string>>& headers) {
  std::ostringstream out;
  out << kBegin << label << kDashes << "\n";
  for (const auto& [key, value] : headers) out << key << ": " << value << "\n";
  out << "\n";
  const std::string body = base64_encode(data);
  for (std::size_t i = 0; i < body.size(); i += kArmorLineWidth) {
    out << body.substr(i, kArmorLineWidth) << "\n";
  }
  const std::uint32_t crc = crc24(data);
  const std::uint8_t crc_bytes[3] = {static_cast<std::uint8_t>(crc >> 16),
                                     static_cast<std::uint8_t>(crc >> 8),
                                     static_cast<std::uint8_t>(crc)};
  out << "=" << base64_encode(crc_bytes) << "\n";
  out << kEnd << label << kDashes << "\n";
  return out.str();
}

ArmoredMessage dearmor(std::string_view text) {
  const auto lines = split_lines(text);
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw Error(ErrorCode::kBadFraming, "empty input");

  std::string_view begin = trim(lines[i]);
  if (!begin.starts_with(kBegin) || !begin.ends_with(kDashes) ||
      begin.size() < kBegin.size() + kDashes.size()) {
    throw Error(ErrorCode::kBadFraming, "missing BEGIN line");
  }
  ArmoredMessage msg;
  msg.label = std::string(begin.substr(
      kBegin.size(), begin.size() - kBegin.size() - kDashes.size()));
  ++i;

  for (; i < lines.size() && !trim(lines[i]).empty(); ++i) {
    std::string_view line = lines[i];
    std::size_t colon = line.find(": ");
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::kBadFraming, "malformed armor header");
    }
    msg.headers.emplace_back(std::string(line.substr(0, colon)),
                             std::string(trim(line.substr(colon + 2))));
  }
  if (i == lines.size()) throw Error(ErrorCode::kBadFraming, "missing body");
  ++i;

  std::string body;
  std::string_view checksum;
  bool have_checksum = false;
  for (; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.starts_with(kEnd)) break;
    if (have_checksum) {
      throw Error(ErrorCode::kBadFraming, "data after checksum line");
    }
    if (line.starts_with("=")) {
      checksum = line.substr(1);
      have_checksum = true;
      continue;
    }
    if (line.size() > kArmorLineWidth) {
      throw Error(ErrorCode::kBadFraming, "armor line too long");
    }
    body.append(line);
  }
  if (i == lines.size()) throw Error(ErrorCode::kBadFraming, "missing END line");
  std::string_view end = trim(lines[i]);
  std::string expected_end = std::string(kEnd) + msg.label + std::string(kDashes);
  if (end != expected_end) {
    throw Error(ErrorCode::kBadFraming, "END label does not match BEGIN");
  }
  if (!have_checksum) throw Error(ErrorCode::kBadFraming, "missing checksum");
  for (++i; i < lines.size(); ++i) {
    if (!trim(lines[i]).empty()) {
      throw Error(ErrorCode::kBadFraming, "trailing data after END line");
    }
  }

  msg.data = base64_decode(body);
  Bytes crc_bytes = base64_decode(checksum);
  if (crc_bytes.size() != 3) {
    throw Error(ErrorCode::kBadFraming, "checksum must be 3 octets");
  }
  const std::uint32_t expected = (std::uint32_t{crc_bytes[0]} << 16) |
                                 (std::uint32_t{crc_bytes[1]} << 8) |
                                 crc_bytes[2];
  if (crc24(msg.data) != expected) {
    throw Error(ErrorCode::kChecksumMismatch, "armor CRC24 mismatch");
  }
  return msg;
}

}  // namespace pgpfwd
