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

// x-only Curve25519: u-coordinates over GF(2^255 - 19), Montgomery ladder,
// and subgroup validation.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "pgpfwd/scalar_field.hpp"

namespace pgpfwd {

using PointBytes = std::array<std::uint8_t, 32>;

// A u-coordinate in RFC 7748 wire form. Bit 255 is always clear. The
// all-zero encoding doubles as the Identity: the ladder maps the point at
// infinity to u = 0, the same convention X25519 uses to flag low-order
// inputs.
class CurvePoint {
 public:
  constexpr CurvePoint() = default;

  static CurvePoint from_bytes(std::span<const std::uint8_t, 32> bytes);
  static CurvePoint from_hex(std::string_view hex);
  static CurvePoint identity() { return CurvePoint(); }
  static CurvePoint base_point();

  const PointBytes& bytes() const { return bytes_; }
  std::string to_hex() const;

  // True for the all-zero encoding only; non-canonical aliases of zero
  // (u = p) are not identical encodings.
  bool is_identity() const;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;

 private:
  PointBytes bytes_{};
};

struct CurveParams {
  static constexpr std::uint32_t kCofactor = 8;
  static constexpr std::uint32_t kBaseU = 9;
  static constexpr std::uint32_t kA24 = 121665;
  // p = 2^255 - 19, little-endian.
  static const PointBytes& prime_bytes();
  // n, little-endian; same value as group_order_bytes().
  static const ScalarBytes& order_bytes();
};

// Fixed-sequence ladder over all 256 scalar bits; no branch or memory access
// depends on the scalar. No clamping is applied.
CurvePoint scalar_mul(std::span<const std::uint8_t, 32> scalar,
                      const CurvePoint& point);
CurvePoint scalar_mul(const Scalar& k, const CurvePoint& point);
CurvePoint scalar_mul(const ClampedSecret& k, const CurvePoint& point);

CurvePoint base_mul(const ClampedSecret& d);

// RFC 7748 X25519: clamps the scalar, then runs the ladder.
CurvePoint x25519(std::span<const std::uint8_t, 32> scalar,
                  const CurvePoint& point);

// h*P = Identity with h = 8. Inputs are public, so this may exit early.
bool is_low_order(const CurvePoint& point);

// n*P = Identity and P != Identity. Rejects mixed-order points that the
// cofactor test alone would accept.
bool is_in_large_subgroup(const CurvePoint& point);

// Per-thread instrumentation of curve work.
struct CurveOpCounters {
  std::uint64_t scalar_muls = 0;   // scalar_mul / base_mul / x25519 calls
  std::uint64_t validations = 0;   // is_low_order / is_in_large_subgroup
};

CurveOpCounters& curve_op_counters();

}  // namespace pgpfwd
