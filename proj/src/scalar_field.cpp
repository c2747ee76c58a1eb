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

#include "pgpfwd/scalar_field.hpp"

#include <algorithm>

#include "pgpfwd/errors.hpp"

namespace pgpfwd {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using Limbs = Scalar::Limbs;

constexpr Limbs kOrder = {0x5812631a5cf5d3edULL, 0x14def9dea2f79cd6ULL, 0,
                          0x1000000000000000ULL};

// r = a - b, returns the borrow.
constexpr u64 sub_limbs(Limbs& r, const Limbs& a, const Limbs& b) {
  u64 borrow = 0;
  for (int i = 0; i < 4; ++i) {
    u128 d = static_cast<u128>(a[i]) - b[i] - borrow;
    r[i] = static_cast<u64>(d);
    borrow = static_cast<u64>(d >> 64) & 1;
  }
  return borrow;
}

constexpr u64 add_limbs(Limbs& r, const Limbs& a, const Limbs& b) {
  u64 carry = 0;
  for (int i = 0; i < 4; ++i) {
    u128 s = static_cast<u128>(a[i]) + b[i] + carry;
    r[i] = static_cast<u64>(s);
    carry = static_cast<u64>(s >> 64);
  }
  return carry;
}

// mask is all-ones or zero.
constexpr void select(Limbs& r, u64 mask, const Limbs& if_set,
                      const Limbs& if_clear) {
  for (int i = 0; i < 4; ++i) {
    r[i] = (if_set[i] & mask) | (if_clear[i] & ~mask);
  }
}

// r = x - m if x >= m (x may carry one extra high bit in `hi`).
constexpr Limbs reduce_once(const Limbs& x, u64 hi, const Limbs& m) {
  Limbs diff{};
  u64 borrow = sub_limbs(diff, x, m);
  // Keep the subtraction when hi absorbs the borrow or no borrow occurred.
  u64 keep = static_cast<u64>(0) - ((hi | (borrow ^ 1)) & 1);
  Limbs out{};
  select(out, keep, diff, x);
  return out;
}

constexpr Limbs shift_left(const Limbs& x, int bits) {
  Limbs r{};
  for (int i = 3; i >= 0; --i) {
    r[i] = x[i] << bits;
    if (i > 0) r[i] |= x[i - 1] >> (64 - bits);
  }
  return r;
}

constexpr u64 compute_n_prime() {
  u64 inv = 1;
  for (int i = 0; i < 7; ++i) inv *= 2 - kOrder[0] * inv;
  return static_cast<u64>(0) - inv;
}

constexpr u64 kNPrime = compute_n_prime();

// 2^512 mod n by repeated doubling.
constexpr Limbs compute_r2() {
  Limbs r = {1, 0, 0, 0};
  for (int i = 0; i < 512; ++i) {
    Limbs doubled{};
    u64 carry = add_limbs(doubled, r, r);
    r = reduce_once(doubled, carry, kOrder);
  }
  return r;
}

constexpr Limbs kR2 = compute_r2();

// a * b * 2^-256 mod n for a, b < n.
Limbs mont_mul(const Limbs& a, const Limbs& b) {
  u64 t[6] = {0, 0, 0, 0, 0, 0};
  for (int i = 0; i < 4; ++i) {
    u64 carry = 0;
    for (int j = 0; j < 4; ++j) {
      u128 acc = static_cast<u128>(a[j]) * b[i] + t[j] + carry;
      t[j] = static_cast<u64>(acc);
      carry = static_cast<u64>(acc >> 64);
    }
    u128 acc = static_cast<u128>(t[4]) + carry;
    t[4] = static_cast<u64>(acc);
    t[5] = static_cast<u64>(acc >> 64);

    u64 m = t[0] * kNPrime;
    acc = static_cast<u128>(m) * kOrder[0] + t[0];
    carry = static_cast<u64>(acc >> 64);
    for (int j = 1; j < 4; ++j) {
      acc = static_cast<u128>(m) * kOrder[j] + t[j] + carry;
      t[j - 1] = static_cast<u64>(acc);
      carry = static_cast<u64>(acc >> 64);
    }
    acc = static_cast<u128>(t[4]) + carry;
    t[3] = static_cast<u64>(acc);
    t[4] = t[5] + static_cast<u64>(acc >> 64);
  }
  return reduce_once(Limbs{t[0], t[1], t[2], t[3]}, t[4], kOrder);
}

Limbs to_mont(const Limbs& a) { return mont_mul(a, kR2); }
Limbs from_mont(const Limbs& a) { return mont_mul(a, Limbs{1, 0, 0, 0}); }

Limbs load_le(std::span<const std::uint8_t, 32> bytes) {
  Limbs r{};
  for (int i = 0; i < 32; ++i) {
    r[i / 8] |= static_cast<u64>(bytes[i]) << (8 * (i % 8));
  }
  return r;
}

}  // namespace

Scalar Scalar::from_bytes(std::span<const std::uint8_t, 32> bytes) {
  // Input < 2^256 < 16n: binary long division by 8n, 4n, 2n, n.
  Limbs x = load_le(bytes);
  for (int shift = 3; shift >= 0; --shift) {
    x = reduce_once(x, 0, shift == 0 ? kOrder : shift_left(kOrder, shift));
  }
  return Scalar(x);
}

Scalar Scalar::from_hex(std::string_view hex) {
  auto raw = array_from_hex<32>(hex);
  return from_bytes(raw);
}

ScalarBytes Scalar::to_bytes() const {
  ScalarBytes out{};
  for (int i = 0; i < 32; ++i) {
    out[i] = static_cast<std::uint8_t>(limbs_[i / 8] >> (8 * (i % 8)));
  }
  return out;
}

std::string Scalar::to_hex() const { return pgpfwd::to_hex(to_bytes()); }

bool Scalar::is_zero() const {
  return (limbs_[0] | limbs_[1] | limbs_[2] | limbs_[3]) == 0;
}

const ScalarBytes& group_order_bytes() {
  static const ScalarBytes kBytes = [] {
    ScalarBytes out{};
    for (int i = 0; i < 32; ++i) {
      out[i] = static_cast<std::uint8_t>(kOrder[i / 8] >> (8 * (i % 8)));
    }
    return out;
  }();
  return kBytes;
}

Scalar scalar_from_bytes(std::span<const std::uint8_t, 32> bytes) {
  return Scalar::from_bytes(bytes);
}

Scalar scalar_add_mod(const Scalar& a, const Scalar& b) {
  Limbs sum{};
  u64 carry = add_limbs(sum, a.limbs_, b.limbs_);
  return Scalar(reduce_once(sum, carry, kOrder));
}

Scalar scalar_sub_mod(const Scalar& a, const Scalar& b) {
  Limbs diff{};
  u64 borrow = sub_limbs(diff, a.limbs_, b.limbs_);
  Limbs wrapped{};
  add_limbs(wrapped, diff, kOrder);
  Limbs out{};
  select(out, static_cast<u64>(0) - borrow, wrapped, diff);
  return Scalar(out);
}

Scalar scalar_mul_mod(const Scalar& a, const Scalar& b) {
  return Scalar(mont_mul(mont_mul(a.limbs_, b.limbs_), kR2));
}

Scalar scalar_invert(const Scalar& x) {
  if (x.is_zero()) {
    throw Error(ErrorCode::kZeroInverse, "zero has no inverse mod n");
  }
  Limbs exponent{};
  sub_limbs(exponent, kOrder, Limbs{2, 0, 0, 0});

  const Limbs base = to_mont(x.limbs_);
  Limbs acc = to_mont(Limbs{1, 0, 0, 0});
  // The exponent is the public constant n - 2, so this branch pattern is
  // identical for every input.
  for (int bit = 252; bit >= 0; --bit) {
    acc = mont_mul(acc, acc);
    if ((exponent[bit / 64] >> (bit % 64)) & 1) acc = mont_mul(acc, base);
  }
  return Scalar(from_mont(acc));
}

ClampedSecret::~ClampedSecret() { secure_zero(raw_); }

ClampedSecret ClampedSecret::clamp(std::span<const std::uint8_t, 32> bytes) {
  ClampedSecret s;
  std::copy(bytes.begin(), bytes.end(), s.raw_.begin());
  s.raw_[0] &= 248;
  s.raw_[31] &= 127;
  s.raw_[31] |= 64;
  s.scalar_ = Scalar::from_bytes(s.raw_);
  return s;
}

ClampedSecret ClampedSecret::from_hex(std::string_view hex) {
  auto raw = array_from_hex<32>(hex);
  ClampedSecret s = clamp(raw);
  secure_zero(raw);
  return s;
}

ProxyFactor::ProxyFactor(const Scalar& value) : value_(value) {
  if (value.is_zero()) {
    throw Error(ErrorCode::kInvalidArgument, "proxy factor must be nonzero");
  }
}

ProxyFactor derive_proxy_factor(const ClampedSecret& d_source,
                                const ClampedSecret& d_dest) {
  return ProxyFactor(
      scalar_mul_mod(d_source.as_scalar(), scalar_invert(d_dest.as_scalar())));
}

}  // namespace pgpfwd
