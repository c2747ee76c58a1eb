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

// Binary encodings for the OpenPGP-style structures the forwarding scheme
// touches. Layouts are frozen in docs/wire-format.md.

#include <cstdint>
#include <optional>
#include <vector>

#include "pgpfwd/bytes.hpp"
#include "pgpfwd/curve_group.hpp"
#include "pgpfwd/scalar_field.hpp"

namespace pgpfwd {

inline constexpr std::uint8_t kPkAlgoEcdh = 18;

inline constexpr std::uint8_t kHashSha256 = 0x08;
inline constexpr std::uint8_t kHashSha384 = 0x09;
inline constexpr std::uint8_t kHashSha512 = 0x0A;

inline constexpr std::uint8_t kSymAes128 = 0x07;
inline constexpr std::uint8_t kSymAes192 = 0x08;
inline constexpr std::uint8_t kSymAes256 = 0x09;

// Packet tags.
inline constexpr std::uint8_t kTagPkesk = 1;
inline constexpr std::uint8_t kTagSecretSubkey = 7;
inline constexpr std::uint8_t kTagPublicSubkey = 14;
inline constexpr std::uint8_t kTagSealedPayload = 60;  // private range

inline constexpr std::uint8_t kKdfFlagFingerprint = 0x01;

// OID 1.3.6.1.4.1.3029.1.5.1 (Curve25519 for ECDH), DER body only.
const Bytes& curve25519_oid();

// Variable-length KDF parameter field of an ECDH key.
//
//   v1: size=03 | 01 | hash | sym
//   v2: size    | 02 | hash | sym | flags [| fingerprint(20) if flags & 01]
struct KdfParams {
  std::uint8_t version = 1;
  std::uint8_t hash_id = kHashSha256;
  std::uint8_t sym_id = kSymAes256;
  std::uint8_t flags = 0;  // v2 only
  std::optional<Fingerprint> replacement_fingerprint;

  static KdfParams v1(std::uint8_t hash_id = kHashSha256,
                      std::uint8_t sym_id = kSymAes256);
  static KdfParams forwarding(const Fingerprint& original,
                              std::uint8_t hash_id = kHashSha256,
                              std::uint8_t sym_id = kSymAes256);

  // The fingerprint a decryptor must feed the KDF instead of its own, if any.
  // v2 with flags = 00 behaves like v1.
  std::optional<Fingerprint> kdf_fingerprint_override() const;

  friend bool operator==(const KdfParams&, const KdfParams&) = default;
};

// Parses exactly one KDF field spanning all of `bytes`.
KdfParams parse_kdf_params(ByteView bytes);
Bytes serialize_kdf_params(const KdfParams& params);

// A new-format packet: tag plus body. Partial lengths are not supported.
struct Packet {
  std::uint8_t tag = 0;
  Bytes body;

  friend bool operator==(const Packet&, const Packet&) = default;
};

Bytes serialize_packet(std::uint8_t tag, ByteView body);
std::vector<Packet> parse_packets(ByteView bytes);

// Public-Key Encrypted Session Key packet (tag 1), version 3, ECDH.
struct Pkesk {
  std::uint8_t version = 3;
  KeyId recipient_key_id{};
  std::uint8_t pk_algorithm = kPkAlgoEcdh;
  Bytes curve_oid = curve25519_oid();
  CurvePoint ephemeral;
  Bytes wrapped_session_key;

  friend bool operator==(const Pkesk&, const Pkesk&) = default;
};

// Whole packet, header included. Throws kMalformedPacket or
// kUnsupportedAlgorithm.
Pkesk parse_pkesk(ByteView packet);
Pkesk parse_pkesk_body(ByteView body);
Bytes serialize_pkesk(const Pkesk& pkesk);
Bytes serialize_pkesk_body(const Pkesk& pkesk);

// Replaces the ephemeral and the recipient key ID; everything else is
// carried over verbatim.
Pkesk rewrite_pkesk(const Pkesk& pkesk, const CurvePoint& new_ephemeral,
                    const KeyId& new_key_id);

// A message: one or more PKESKs followed by the sealed payload packet, whose
// body is kept as opaque octets.
struct EncryptedMessage {
  std::vector<Pkesk> pkesks;
  Bytes sealed_payload;

  friend bool operator==(const EncryptedMessage&,
                         const EncryptedMessage&) = default;
};

EncryptedMessage parse_message(ByteView bytes);
Bytes serialize_message(const EncryptedMessage& message);

// ECDH public subkey material (tag 14 body).
struct PublicKeyMaterial {
  Bytes curve_oid = curve25519_oid();
  CurvePoint public_point;
  KdfParams kdf;

  friend bool operator==(const PublicKeyMaterial&,
                         const PublicKeyMaterial&) = default;
};

Bytes serialize_public_key_body(const PublicKeyMaterial& key);
PublicKeyMaterial parse_public_key_body(ByteView body);

// SHA-1 over 0x99 | u16 body length | public key body.
Fingerprint fingerprint(const PublicKeyMaterial& key);

// Secret subkey (tag 7 body): public body | 00 | 20 | secret(32) | sum16.
struct SecretKeyMaterial {
  PublicKeyMaterial public_key;
  ClampedSecret secret;
};

Bytes serialize_secret_key_body(const SecretKeyMaterial& key);
SecretKeyMaterial parse_secret_key_body(ByteView body);

}  // namespace pgpfwd
