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

// Deferred ECDH and its diverted form: the sender encapsulates to Q_B, the
// proxy multiplies the ephemeral share by k = d_B / d_C, and the forwardee
// recovers the same shared point with d_C.

#include "pgpfwd/curve_group.hpp"
#include "pgpfwd/pgp_codec.hpp"
#include "pgpfwd/random.hpp"
#include "pgpfwd/scalar_field.hpp"

namespace pgpfwd {

struct KeyPair {
  ClampedSecret secret;
  PublicKeyMaterial public_key;
  Fingerprint fingerprint{};
  KeyId key_id{};

  const CurvePoint& public_point() const { return public_key.public_point; }
};

ClampedSecret random_secret(RandomSource& rng);

// Derives public point, fingerprint and key ID from a secret.
KeyPair keypair_from_secret(const ClampedSecret& secret,
                            const KdfParams& kdf = KdfParams::v1());

KeyPair generate_keypair(RandomSource& rng,
                         const KdfParams& kdf = KdfParams::v1());

struct Encapsulation {
  CurvePoint ephemeral;      // P = d_A * G
  CurvePoint shared_secret;  // S = d_A * Q
};

// Throws Error(kInvalidRecipientKey) unless the recipient key lies in the
// prime-order subgroup. d_A is wiped before returning.
Encapsulation sender_encapsulate(const CurvePoint& recipient_public,
                                 RandomSource& rng);

// d * P. Throws Error(kDegenerateSecret) on an all-zero result.
CurvePoint receiver_decapsulate(const ClampedSecret& secret,
                                const CurvePoint& ephemeral);

struct ForwardingGrant {
  KeyPair new_keypair;       // handed to the forwardee
  ProxyFactor proxy_factor;  // handed to the proxy
  Fingerprint source_fingerprint{};
};

// Fresh forwardee key with v2 KDF params carrying source_fingerprint, and
// k = d_source / d_new. Callers must not reuse a grant's secret for a second
// forwardee.
ForwardingGrant setup_forwarding(const ClampedSecret& source_secret,
                                 const Fingerprint& source_fingerprint,
                                 RandomSource& rng,
                                 std::uint8_t hash_id = kHashSha256,
                                 std::uint8_t sym_id = kSymAes256);

// k * P after validating P. Throws Error(kSmallSubgroupRejection) when
// 8P = Identity, Error(kNotInLargeSubgroup) when nP != Identity.
CurvePoint proxy_transform(const ProxyFactor& k, const CurvePoint& ephemeral);

// d_C * P_C. Throws Error(kDegenerateSecret) on an all-zero result.
CurvePoint forwarded_decapsulate(const ClampedSecret& forwardee_secret,
                                 const CurvePoint& transformed);

}  // namespace pgpfwd
