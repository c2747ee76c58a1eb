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

// GF(2^255 - 19) in radix 2^51. Internal to the curve layer.

#include <array>
#include <cstdint>
#include <span>

namespace pgpfwd::detail {

struct Fe {
  std::array<std::uint64_t, 5> v{};
};

inline constexpr std::uint64_t kMask51 = (std::uint64_t{1} << 51) - 1;

inline Fe fe_zero() { return Fe{}; }
inline Fe fe_one() { return Fe{{1, 0, 0, 0, 0}}; }

// Bit 255 is ignored; non-canonical values (>= p) are accepted.
Fe fe_from_bytes(std::span<const std::uint8_t, 32> bytes);
std::array<std::uint8_t, 32> fe_to_bytes(const Fe& a);

Fe fe_add(const Fe& a, const Fe& b);
Fe fe_sub(const Fe& a, const Fe& b);
Fe fe_mul(const Fe& a, const Fe& b);
Fe fe_sq(const Fe& a);
Fe fe_mul_small(const Fe& a, std::uint32_t k);
// a^(p-2); maps 0 to 0.
Fe fe_invert(const Fe& a);

// Swaps a and b when bit == 1, without branching on bit.
void fe_cswap(Fe& a, Fe& b, std::uint64_t bit);

}  // namespace pgpfwd::detail
