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

#include "field25519.hpp"

namespace pgpfwd::detail {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

Fe carry_propagate(u128 t0, u128 t1, u128 t2, u128 t3, u128 t4) {
  Fe r;
  t1 += static_cast<u64>(t0 >> 51);
  r.v[0] = static_cast<u64>(t0) & kMask51;
  t2 += static_cast<u64>(t1 >> 51);
  r.v[1] = static_cast<u64>(t1) & kMask51;
  t3 += static_cast<u64>(t2 >> 51);
  r.v[2] = static_cast<u64>(t2) & kMask51;
  t4 += static_cast<u64>(t3 >> 51);
  r.v[3] = static_cast<u64>(t3) & kMask51;
  u64 c = static_cast<u64>(t4 >> 51);
  r.v[4] = static_cast<u64>(t4) & kMask51;
  r.v[0] += c * 19;
  r.v[1] += r.v[0] >> 51;
  r.v[0] &= kMask51;
  return r;
}

}  // namespace

Fe fe_from_bytes(std::span<const std::uint8_t, 32> bytes) {
  auto load64 = [&](int offset) {
    u64 r = 0;
    for (int i = 0; i < 8; ++i) {
      r |= static_cast<u64>(bytes[offset + i]) << (8 * i);
    }
    return r;
  };
  Fe r;
  r.v[0] = load64(0) & kMask51;
  r.v[1] = (load64(6) >> 3) & kMask51;
  r.v[2] = (load64(12) >> 6) & kMask51;
  r.v[3] = (load64(19) >> 1) & kMask51;
  r.v[4] = (load64(24) >> 12) & kMask51;
  return r;
}

std::array<std::uint8_t, 32> fe_to_bytes(const Fe& a) {
  // Fully carry into 51-bit limbs (value < 2^255), then subtract p once if
  // the value is >= p.
  Fe t = a;
  for (int pass = 0; pass < 3; ++pass) {
    u64 c = 0;
    for (int i = 0; i < 5; ++i) {
      t.v[i] += c;
      c = t.v[i] >> 51;
      t.v[i] &= kMask51;
    }
    t.v[0] += 19 * c;
  }

  // q = 1 iff t >= p, computed by adding 19 and watching bit 255.
  u64 q = (t.v[0] + 19) >> 51;
  q = (t.v[1] + q) >> 51;
  q = (t.v[2] + q) >> 51;
  q = (t.v[3] + q) >> 51;
  q = (t.v[4] + q) >> 51;

  t.v[0] += 19 * q;
  t.v[1] += t.v[0] >> 51;
  t.v[0] &= kMask51;
  t.v[2] += t.v[1] >> 51;
  t.v[1] &= kMask51;
  t.v[3] += t.v[2] >> 51;
  t.v[2] &= kMask51;
  t.v[4] += t.v[3] >> 51;
  t.v[3] &= kMask51;
  t.v[4] &= kMask51;

  u64 w0 = t.v[0] | (t.v[1] << 51);
  u64 w1 = (t.v[1] >> 13) | (t.v[2] << 38);
  u64 w2 = (t.v[2] >> 26) | (t.v[3] << 25);
  u64 w3 = (t.v[3] >> 39) | (t.v[4] << 12);
  std::array<std::uint8_t, 32> out{};
  const u64 words[4] = {w0, w1, w2, w3};
  for (int i = 0; i < 32; ++i) {
    out[i] = static_cast<std::uint8_t>(words[i / 8] >> (8 * (i % 8)));
  }
  return out;
}

Fe fe_add(const Fe& a, const Fe& b) {
  Fe r;
  for (int i = 0; i < 5; ++i) r.v[i] = a.v[i] + b.v[i];
  return r;
}

Fe fe_sub(const Fe& a, const Fe& b) {
  // Add 4p before subtracting so limbs stay non-negative.
  static constexpr u64 kFourP0 = 0x1fffffffffffb4ULL;
  static constexpr u64 kFourPi = 0x1ffffffffffffcULL;
  Fe r;
  r.v[0] = a.v[0] + kFourP0 - b.v[0];
  for (int i = 1; i < 5; ++i) r.v[i] = a.v[i] + kFourPi - b.v[i];
  return carry_propagate(r.v[0], r.v[1], r.v[2], r.v[3], r.v[4]);
}

Fe fe_mul(const Fe& a, const Fe& b) {
  const u64 b1_19 = b.v[1] * 19;
  const u64 b2_19 = b.v[2] * 19;
  const u64 b3_19 = b.v[3] * 19;
  const u64 b4_19 = b.v[4] * 19;
  auto m = [](u64 x, u64 y) { return static_cast<u128>(x) * y; };

  u128 t0 = m(a.v[0], b.v[0]) + m(a.v[1], b4_19) + m(a.v[2], b3_19) +
            m(a.v[3], b2_19) + m(a.v[4], b1_19);
  u128 t1 = m(a.v[0], b.v[1]) + m(a.v[1], b.v[0]) + m(a.v[2], b4_19) +
            m(a.v[3], b3_19) + m(a.v[4], b2_19);
  u128 t2 = m(a.v[0], b.v[2]) + m(a.v[1], b.v[1]) + m(a.v[2], b.v[0]) +
            m(a.v[3], b4_19) + m(a.v[4], b3_19);
  u128 t3 = m(a.v[0], b.v[3]) + m(a.v[1], b.v[2]) + m(a.v[2], b.v[1]) +
            m(a.v[3], b.v[0]) + m(a.v[4], b4_19);
  u128 t4 = m(a.v[0], b.v[4]) + m(a.v[1], b.v[3]) + m(a.v[2], b.v[2]) +
            m(a.v[3], b.v[1]) + m(a.v[4], b.v[0]);
  return carry_propagate(t0, t1, t2, t3, t4);
}

Fe fe_sq(const Fe& a) { return fe_mul(a, a); }

Fe fe_mul_small(const Fe& a, std::uint32_t k) {
  return carry_propagate(static_cast<u128>(a.v[0]) * k,
                         static_cast<u128>(a.v[1]) * k,
                         static_cast<u128>(a.v[2]) * k,
                         static_cast<u128>(a.v[3]) * k,
                         static_cast<u128>(a.v[4]) * k);
}

Fe fe_invert(const Fe& a) {
  // Standard addition chain for p - 2 = 2^255 - 21.
  auto sq_n = [](Fe x, int n) {
    for (int i = 0; i < n; ++i) x = fe_sq(x);
    return x;
  };
  Fe z2 = fe_sq(a);
  Fe z9 = fe_mul(sq_n(z2, 2), a);
  Fe z11 = fe_mul(z9, z2);
  Fe z2_5_0 = fe_mul(fe_sq(z11), z9);
  Fe z2_10_0 = fe_mul(sq_n(z2_5_0, 5), z2_5_0);
  Fe z2_20_0 = fe_mul(sq_n(z2_10_0, 10), z2_10_0);
  Fe z2_40_0 = fe_mul(sq_n(z2_20_0, 20), z2_20_0);
  Fe z2_50_0 = fe_mul(sq_n(z2_40_0, 10), z2_10_0);
  Fe z2_100_0 = fe_mul(sq_n(z2_50_0, 50), z2_50_0);
  Fe z2_200_0 = fe_mul(sq_n(z2_100_0, 100), z2_100_0);
  Fe z2_250_0 = fe_mul(sq_n(z2_200_0, 50), z2_50_0);
  return fe_mul(sq_n(z2_250_0, 5), z11);
}

void fe_cswap(Fe& a, Fe& b, std::uint64_t bit) {
  const u64 mask = static_cast<u64>(0) - bit;
  for (int i = 0; i < 5; ++i) {
    u64 x = mask & (a.v[i] ^ b.v[i]);
    a.v[i] ^= x;
    b.v[i] ^= x;
  }
}

}  // namespace pgpfwd::detail
