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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pgpfwd {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

using Fingerprint = std::array<std::uint8_t, 20>;
using KeyId = std::array<std::uint8_t, 8>;

std::string to_hex(ByteView data);

// Accepts upper or lower case; throws Error(kInvalidArgument) on odd length
// or non-hex characters.
Bytes from_hex(std::string_view hex);

template <std::size_t N>
std::array<std::uint8_t, N> array_from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline std::string to_string(ByteView data) {
  return {reinterpret_cast<const char*>(data.data()), data.size()};
}

// Overwrites the buffer in a way the optimizer may not elide.
void secure_zero(std::span<std::uint8_t> data) noexcept;

KeyId key_id_of(const Fingerprint& fp);

}  // namespace pgpfwd
