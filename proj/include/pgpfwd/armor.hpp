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

#pragma once

// ASCII armor: BEGIN/END framing, optional headers, 64-column base64 body,
// and a CRC24 checksum line.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pgpfwd/bytes.hpp"

namespace pgpfwd {

inline constexpr std::string_view kArmorMessage = "PGP MESSAGE";
inline constexpr std::string_view kArmorPublicKey = "PGP PUBLIC KEY BLOCK";
inline constexpr std::string_view kArmorPrivateKey = "PGP PRIVATE KEY BLOCK";

inline constexpr std::size_t kArmorLineWidth = 64;

// CRC-24 with init 0xB704CE and generator 0x1864CFB.
std::uint32_t crc24(ByteView data);

struct ArmoredMessage {
  std::string label;
  std::vector<std::pair<std::string, std::string>> headers;
  Bytes data;
};

std::string armor(ByteView data, std::string_view label,
                  const std::vector<std::pair<std::string, std::string>>&
                      headers = {});

// Throws Error(kBadFraming) for missing/mismatched BEGIN/END lines, bad
// base64 or a missing checksum line, Error(kChecksumMismatch) when the
// CRC24 does not match.
ArmoredMessage dearmor(std::string_view text);

}  // namespace pgpfwd
