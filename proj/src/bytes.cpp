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

#include "pgpfwd/bytes.hpp"

#include <algorithm>

#include <openssl/crypto.h>

#include "pgpfwd/errors.hpp"

namespace pgpfwd {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kZeroInverse: return "ZeroInverse";
    case ErrorCode::kInvalidRecipientKey: return "InvalidRecipientKey";
    case ErrorCode::kDegenerateSecret: return "DegenerateSecret";
    case ErrorCode::kSmallSubgroupRejection: return "SmallSubgroupRejection";
    case ErrorCode::kNotInLargeSubgroup: return "NotInLargeSubgroup";
    case ErrorCode::kUnwrapIntegrityFailure: return "UnwrapIntegrityFailure";
    case ErrorCode::kPayloadAuthFailure: return "PayloadAuthFailure";
    case ErrorCode::kMalformedPacket: return "MalformedPacket";
    case ErrorCode::kUnsupportedAlgorithm: return "UnsupportedAlgorithm";
    case ErrorCode::kReservedSize: return "ReservedSize";
    case ErrorCode::kUnknownVersion: return "UnknownVersion";
    case ErrorCode::kMissingFingerprint: return "MissingFingerprint";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kBadFraming: return "BadFraming";
    case ErrorCode::kDuplicateEntry: return "DuplicateEntry";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kStorageFailure: return "StorageFailure";
    case ErrorCode::kCorruptStore: return "CorruptStore";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "odd-length hex string");
  }
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorCode::kInvalidArgument, "non-hex character");
    }
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

template <std::size_t N>
std::array<std::uint8_t, N> array_from_hex(std::string_view hex) {
  Bytes raw = from_hex(hex);
  if (raw.size() != N) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected " + std::to_string(N) + " hex octets, got " +
                    std::to_string(raw.size()));
  }
  std::array<std::uint8_t, N> out{};
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

template std::array<std::uint8_t, 8> array_from_hex<8>(std::string_view);
template std::array<std::uint8_t, 20> array_from_hex<20>(std::string_view);
template std::array<std::uint8_t, 32> array_from_hex<32>(std::string_view);

void secure_zero(std::span<std::uint8_t> data) noexcept {
  OPENSSL_cleanse(data.data(), data.size());
}

KeyId key_id_of(const Fingerprint& fp) {
  KeyId id{};
  std::copy(fp.end() - 8, fp.end(), id.begin());
  return id;
}

}  // namespace pgpfwd
