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

// Enc_S / Dec_S: KEK derivation from the ECDH shared point, RFC 3394 key
// wrap of the session key, and the AEAD payload envelope. Message-level
// encrypt/decrypt glue sits on top.

#include <cstdint>
#include <optional>

#include "pgpfwd/bytes.hpp"
#include "pgpfwd/curve_group.hpp"
#include "pgpfwd/forwarding.hpp"
#include "pgpfwd/pgp_codec.hpp"
#include "pgpfwd/random.hpp"

namespace pgpfwd {

// Key length in octets for an AES sym id; throws kUnsupportedAlgorithm.
std::size_t sym_key_size(std::uint8_t sym_id);

struct SessionKey {
  std::uint8_t algorithm_id = kSymAes256;
  Bytes key;

  // Throws kInvalidArgument if key.size() does not match algorithm_id.
  void validate() const;
  static SessionKey generate(RandomSource& rng,
                             std::uint8_t algorithm_id = kSymAes256);

  friend bool operator==(const SessionKey&, const SessionKey&) = default;
};

struct KdfContext {
  Bytes curve_oid = curve25519_oid();
  std::uint8_t kdf_hash_id = kHashSha256;
  std::uint8_t kdf_sym_id = kSymAes256;
  // The ORIGINAL recipient's fingerprint when decrypting forwarded mail.
  Fingerprint fingerprint_for_kdf{};
};

// 00000001 | u(32) | oid_len | oid | 0x12 | 03 01 hash sym |
// "Anonymous Sender    " | fingerprint(20)
Bytes kdf_input_block(const CurvePoint& shared_point, const KdfContext& ctx);

// Hash of kdf_input_block truncated to the wrap cipher's key length.
// Throws kDegenerateSecret on an all-zero shared point.
Bytes derive_kek(const CurvePoint& shared_point, const KdfContext& ctx);

// RFC 3394 AES key wrap (default IV A6A6A6A6A6A6A6A6).
Bytes aes_key_wrap(ByteView kek, ByteView plaintext);
// Throws kUnwrapIntegrityFailure when the integrity check fails.
Bytes aes_key_unwrap(ByteView kek, ByteView wrapped);

// Wraps algo | key | sum16 | PKCS#5 padding to a multiple of 8.
Bytes wrap_session_key(ByteView kek, const SessionKey& sk);
SessionKey unwrap_session_key(ByteView kek, ByteView wrapped);

// 01 | sym | nonce(12) | AES-GCM ciphertext | tag(16); the first two octets
// are authenticated as associated data.
Bytes seal_payload(const SessionKey& sk, ByteView plaintext, RandomSource& rng);
// Throws kPayloadAuthFailure on tamper, wrong key or a short envelope.
Bytes open_payload(const SessionKey& sk, ByteView sealed);

// Binary message for one recipient: PKESK + sealed payload.
Bytes encrypt_message(const PublicKeyMaterial& recipient, ByteView plaintext,
                      RandomSource& rng);

// Picks the PKESK addressed to key.key_id. The KDF fingerprint is the
// explicit override when given, else the key's v2 replacement fingerprint,
// else the key's own fingerprint.
Bytes decrypt_message(const KeyPair& key, ByteView message,
                      std::optional<Fingerprint> kdf_fingerprint = std::nullopt);

// KDF fingerprint the decryptor will use for `key` absent an override.
Fingerprint resolve_kdf_fingerprint(const KeyPair& key);

}  // namespace pgpfwd
