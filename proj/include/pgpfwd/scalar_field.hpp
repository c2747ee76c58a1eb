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

// Arithmetic in F_n, n = 2^252 + 27742317777372353535851937790883648493,
// the prime order of Curve25519's large subgroup.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "pgpfwd/bytes.hpp"

namespace pgpfwd {

using ScalarBytes = std::array<std::uint8_t, 32>;

// Element of F_n. Always fully reduced; encodes as 32 little-endian octets.
class Scalar {
 public:
  using Limbs = std::array<std::uint64_t, 4>;

  constexpr Scalar() = default;

  static Scalar from_u64(std::uint64_t v) { return Scalar(Limbs{v, 0, 0, 0}); }
  // Little-endian decode, reduced mod n.
  static Scalar from_bytes(std::span<const std::uint8_t, 32> bytes);
  static Scalar from_hex(std::string_view hex);

  ScalarBytes to_bytes() const;
  std::string to_hex() const;

  bool is_zero() const;
  const Limbs& limbs() const { return limbs_; }

  friend bool operator==(const Scalar&, const Scalar&) = default;

 private:
  explicit constexpr Scalar(const Limbs& limbs) : limbs_(limbs) {}
  Limbs limbs_{};

  friend Scalar scalar_add_mod(const Scalar&, const Scalar&);
  friend Scalar scalar_sub_mod(const Scalar&, const Scalar&);
  friend Scalar scalar_mul_mod(const Scalar&, const Scalar&);
  friend Scalar scalar_invert(const Scalar&);
};

// n as 32 little-endian octets.
const ScalarBytes& group_order_bytes();

Scalar scalar_from_bytes(std::span<const std::uint8_t, 32> bytes);
Scalar scalar_add_mod(const Scalar& a, const Scalar& b);
Scalar scalar_sub_mod(const Scalar& a, const Scalar& b);
Scalar scalar_mul_mod(const Scalar& a, const Scalar& b);

// Fermat inversion x^(n-2). Throws Error(kZeroInverse) for x = 0.
Scalar scalar_invert(const Scalar& x);

// A Curve25519 secret in 2^254 + 8*{0, ..., 2^251 - 1}.
//
// raw() is the clamped integer itself and is what the ladder consumes;
// as_scalar() is that integer reduced mod n for field arithmetic. The two
// agree on the large subgroup because every point there has order n.
class ClampedSecret {
 public:
  static ClampedSecret clamp(std::span<const std::uint8_t, 32> bytes);
  static ClampedSecret from_hex(std::string_view hex);

  ClampedSecret(const ClampedSecret&) = default;
  ClampedSecret& operator=(const ClampedSecret&) = default;
  ~ClampedSecret();

  const ScalarBytes& raw() const { return raw_; }
  const Scalar& as_scalar() const { return scalar_; }

  friend bool operator==(const ClampedSecret& a, const ClampedSecret& b) {
    return a.raw_ == b.raw_;
  }

 private:
  ClampedSecret() = default;
  ScalarBytes raw_{};
  Scalar scalar_;
};

inline ClampedSecret clamp(std::span<const std::uint8_t, 32> bytes) {
  return ClampedSecret::clamp(bytes);
}

// Nonzero element of F_n held by the proxy. Not clamped: d_source / d_dest
// is generally not a multiple of the cofactor.
class ProxyFactor {
 public:
  // Throws Error(kInvalidArgument) when value is zero.
  explicit ProxyFactor(const Scalar& value);

  const Scalar& value() const { return value_; }

  friend bool operator==(const ProxyFactor&, const ProxyFactor&) = default;

 private:
  Scalar value_;
};

// d_source * d_dest^{-1} mod n.
ProxyFactor derive_proxy_factor(const ClampedSecret& d_source,
                                const ClampedSecret& d_dest);

}  // namespace pgpfwd
