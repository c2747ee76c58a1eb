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

#include "pgpfwd/forwarding.hpp"

#include "pgpfwd/errors.hpp"

namespace pgpfwd {

namespace {

CurvePoint checked_dh(const ClampedSecret& secret, const CurvePoint& point) {
  CurvePoint shared = scalar_mul(secret, point);
  if (shared.is_identity()) {
    throw Error(ErrorCode::kDegenerateSecret, "all-zero shared secret");
  }
  return shared;
}

}  // namespace

ClampedSecret random_secret(RandomSource& rng) {
  ScalarBytes raw{};
  rng.fill(raw);
  ClampedSecret s = ClampedSecret::clamp(raw);
  secure_zero(raw);
  return s;
}

KeyPair keypair_from_secret(const ClampedSecret& secret, const KdfParams& kdf) {
  PublicKeyMaterial pub;
  pub.public_point = base_mul(secret);
  pub.kdf = kdf;
  const Fingerprint fp = fingerprint(pub);
  return KeyPair{secret, std::move(pub), fp, key_id_of(fp)};
}

KeyPair generate_keypair(RandomSource& rng, const KdfParams& kdf) {
  return keypair_from_secret(random_secret(rng), kdf);
}

Encapsulation sender_encapsulate(const CurvePoint& recipient_public,
                                 RandomSource& rng) {
  if (!is_in_large_subgroup(recipient_public)) {
    throw Error(ErrorCode::kInvalidRecipientKey,
                "recipient key is not in the prime-order subgroup");
  }
  // ClampedSecret wipes itself when it leaves scope.
  const ClampedSecret ephemeral_secret = random_secret(rng);
  return Encapsulation{base_mul(ephemeral_secret),
                       checked_dh(ephemeral_secret, recipient_public)};
}

CurvePoint receiver_decapsulate(const ClampedSecret& secret,
                                const CurvePoint& ephemeral) {
  return checked_dh(secret, ephemeral);
}

ForwardingGrant setup_forwarding(const ClampedSecret& source_secret,
                                 const Fingerprint& source_fingerprint,
                                 RandomSource& rng, std::uint8_t hash_id,
                                 std::uint8_t sym_id) {
  KeyPair forwardee = generate_keypair(
      rng, KdfParams::forwarding(source_fingerprint, hash_id, sym_id));
  ProxyFactor k = derive_proxy_factor(source_secret, forwardee.secret);
  return ForwardingGrant{std::move(forwardee), k, source_fingerprint};
}

CurvePoint proxy_transform(const ProxyFactor& k, const CurvePoint& ephemeral) {
  if (is_low_order(ephemeral)) {
    throw Error(ErrorCode::kSmallSubgroupRejection,
                "ephemeral has order dividing the cofactor");
  }
  if (!is_in_large_subgroup(ephemeral)) {
    throw Error(ErrorCode::kNotInLargeSubgroup,
                "ephemeral is not in the prime-order subgroup");
  }
  return scalar_mul(k.value(), ephemeral);
}

CurvePoint forwarded_decapsulate(const ClampedSecret& forwardee_secret,
                                 const CurvePoint& transformed) {
  return checked_dh(forwardee_secret, transformed);
}

}  // namespace pgpfwd
