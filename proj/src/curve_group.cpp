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

#include "pgpfwd/curve_group.hpp"

#include <algorithm>

#include "field25519.hpp"

namespace pgpfwd {

using detail::Fe;

namespace {

struct Projective {
  Fe x;
  Fe z;
};

// RFC 7748 ladder, run over bits 255..0.
Projective ladder(std::span<const std::uint8_t, 32> scalar, const Fe& x1) {
  Fe x2 = detail::fe_one();
  Fe z2 = detail::fe_zero();
  Fe x3 = x1;
  Fe z3 = detail::fe_one();
  std::uint64_t swap = 0;

  for (int t = 255; t >= 0; --t) {
    const std::uint64_t k_t = (scalar[t / 8] >> (t % 8)) & 1;
    swap ^= k_t;
    detail::fe_cswap(x2, x3, swap);
    detail::fe_cswap(z2, z3, swap);
    swap = k_t;

    const Fe a = detail::fe_add(x2, z2);
    const Fe aa = detail::fe_sq(a);
    const Fe b = detail::fe_sub(x2, z2);
    const Fe bb = detail::fe_sq(b);
    const Fe e = detail::fe_sub(aa, bb);
    const Fe c = detail::fe_add(x3, z3);
    const Fe d = detail::fe_sub(x3, z3);
    const Fe da = detail::fe_mul(d, a);
    const Fe cb = detail::fe_mul(c, b);
    x3 = detail::fe_sq(detail::fe_add(da, cb));
    z3 = detail::fe_mul(x1, detail::fe_sq(detail::fe_sub(da, cb)));
    x2 = detail::fe_mul(aa, bb);
    z2 = detail::fe_mul(
        e, detail::fe_add(aa, detail::fe_mul_small(e, CurveParams::kA24)));
  }
  detail::fe_cswap(x2, x3, swap);
  detail::fe_cswap(z2, z3, swap);
  return {x2, z2};
}

PointBytes to_affine_bytes(const Projective& p) {
  return detail::fe_to_bytes(detail::fe_mul(p.x, detail::fe_invert(p.z)));
}

bool is_zero(const Fe& f) {
  const auto bytes = detail::fe_to_bytes(f);
  return std::all_of(bytes.begin(), bytes.end(),
                     [](std::uint8_t b) { return b == 0; });
}

// Validation runs on the projective result so the point at infinity
// (Z = 0) is never confused with the order-2 point (X = 0). The ladder's
// differential addition degenerates when the input itself is u = 0, so that
// input is classified up front.
bool annihilated_by(std::span<const std::uint8_t, 32> scalar,
                    const CurvePoint& point) {
  ++curve_op_counters().validations;
  const Fe u = detail::fe_from_bytes(point.bytes());
  return is_zero(ladder(scalar, u).z);
}

bool canonical_u_is_zero(const CurvePoint& point) {
  return is_zero(detail::fe_from_bytes(point.bytes()));
}

}  // namespace

CurveOpCounters& curve_op_counters() {
  thread_local CurveOpCounters counters;
  return counters;
}

CurvePoint CurvePoint::from_bytes(std::span<const std::uint8_t, 32> bytes) {
  CurvePoint p;
  std::copy(bytes.begin(), bytes.end(), p.bytes_.begin());
  p.bytes_[31] &= 0x7f;
  return p;
}

CurvePoint CurvePoint::from_hex(std::string_view hex) {
  return from_bytes(array_from_hex<32>(hex));
}

CurvePoint CurvePoint::base_point() {
  PointBytes b{};
  b[0] = CurveParams::kBaseU;
  return from_bytes(b);
}

std::string CurvePoint::to_hex() const { return pgpfwd::to_hex(bytes_); }

bool CurvePoint::is_identity() const {
  return std::all_of(bytes_.begin(), bytes_.end(),
                     [](std::uint8_t b) { return b == 0; });
}

const PointBytes& CurveParams::prime_bytes() {
  static const PointBytes kPrime = [] {
    PointBytes p{};
    p.fill(0xff);
    p[0] = 0xed;
    p[31] = 0x7f;
    return p;
  }();
  return kPrime;
}

const ScalarBytes& CurveParams::order_bytes() { return group_order_bytes(); }

CurvePoint scalar_mul(std::span<const std::uint8_t, 32> scalar,
                      const CurvePoint& point) {
  ++curve_op_counters().scalar_muls;
  const Fe u = detail::fe_from_bytes(point.bytes());
  return CurvePoint::from_bytes(to_affine_bytes(ladder(scalar, u)));
}

CurvePoint scalar_mul(const Scalar& k, const CurvePoint& point) {
  ScalarBytes bytes = k.to_bytes();
  CurvePoint out = scalar_mul(bytes, point);
  secure_zero(bytes);
  return out;
}

CurvePoint scalar_mul(const ClampedSecret& k, const CurvePoint& point) {
  return scalar_mul(k.raw(), point);
}

CurvePoint base_mul(const ClampedSecret& d) {
  return scalar_mul(d, CurvePoint::base_point());
}

CurvePoint x25519(std::span<const std::uint8_t, 32> scalar,
                  const CurvePoint& point) {
  return scalar_mul(ClampedSecret::clamp(scalar), point);
}

bool is_low_order(const CurvePoint& point) {
  if (canonical_u_is_zero(point)) return true;
  ScalarBytes cofactor{};
  cofactor[0] = CurveParams::kCofactor;
  return annihilated_by(cofactor, point);
}

bool is_in_large_subgroup(const CurvePoint& point) {
  if (canonical_u_is_zero(point)) return false;
  return annihilated_by(group_order_bytes(), point);
}

}  // namespace pgpfwd
