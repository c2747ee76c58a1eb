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

#include "pgpfwd/pgp_codec.hpp"

#include <algorithm>

#include "byte_reader.hpp"
#include "digest.hpp"
#include "pgpfwd/errors.hpp"

namespace pgpfwd {

using detail::append;
using detail::ByteReader;
using detail::put_u16;

namespace {

constexpr std::uint16_t kNativePointBits = 263;  // 0x40 prefix + 256 bits
constexpr std::uint8_t kNativePointPrefix = 0x40;
constexpr std::uint8_t kPublicKeyVersion = 4;
constexpr std::uint8_t kPkeskVersion = 3;

void put_native_point(Bytes& out, const CurvePoint& point) {
  put_u16(out, kNativePointBits);
  out.push_back(kNativePointPrefix);
  append(out, point.bytes());
}

CurvePoint read_native_point(ByteReader& in) {
  if (in.u16() != kNativePointBits) {
    throw Error(ErrorCode::kMalformedPacket,
                "ephemeral MPI bit length is not 263");
  }
  if (in.u8() != kNativePointPrefix) {
    throw Error(ErrorCode::kMalformedPacket, "point is not 0x40-prefixed");
  }
  ByteView raw = in.take(32);
  // Bit 255 set would not survive re-encoding.
  if (raw[31] & 0x80) {
    throw Error(ErrorCode::kMalformedPacket, "u-coordinate has bit 255 set");
  }
  return CurvePoint::from_bytes(raw.first<32>());
}

Bytes read_oid(ByteReader& in) {
  std::uint8_t len = in.u8();
  if (len == 0 || len == 0xFF) {
    throw Error(ErrorCode::kMalformedPacket, "reserved curve OID length");
  }
  ByteView oid = in.take(len);
  if (!std::equal(oid.begin(), oid.end(), curve25519_oid().begin(),
                  curve25519_oid().end())) {
    throw Error(ErrorCode::kUnsupportedAlgorithm, "curve OID is not Curve25519");
  }
  return Bytes(oid.begin(), oid.end());
}

void put_oid(Bytes& out, const Bytes& oid) {
  if (oid.empty() || oid.size() >= 0xFF) {
    throw Error(ErrorCode::kInvalidArgument, "curve OID length out of range");
  }
  out.push_back(static_cast<std::uint8_t>(oid.size()));
  append(out, oid);
}

KdfParams read_kdf_params(ByteReader& in) {
  const std::uint8_t size = in.u8();
  if (size == 0x00 || size == 0xFF) {
    throw Error(ErrorCode::kReservedSize, "KDF params size 0x00/0xFF reserved");
  }
  ByteReader field(in.take(size));
  KdfParams p;
  p.version = field.u8();
  switch (p.version) {
    case 1:
      p.hash_id = field.u8();
      p.sym_id = field.u8();
      break;
    case 2:
      p.hash_id = field.u8();
      p.sym_id = field.u8();
      p.flags = field.u8();
      if (p.flags & kKdfFlagFingerprint) {
        if (field.remaining() < 20) {
          throw Error(ErrorCode::kMissingFingerprint,
                      "flag 0x01 set but fewer than 20 octets remain");
        }
        Fingerprint fp{};
        ByteView raw = field.take(20);
        std::copy(raw.begin(), raw.end(), fp.begin());
        p.replacement_fingerprint = fp;
      }
      break;
    default:
      throw Error(ErrorCode::kUnknownVersion,
                  "KDF params version " + std::to_string(p.version));
  }
  field.expect_end("KDF params");
  return p;
}

}  // namespace

const Bytes& curve25519_oid() {
  static const Bytes kOid = {0x2B, 0x06, 0x01, 0x04, 0x01,
                             0x97, 0x55, 0x01, 0x05, 0x01};
  return kOid;
}

KdfParams KdfParams::v1(std::uint8_t hash_id, std::uint8_t sym_id) {
  KdfParams p;
  p.version = 1;
  p.hash_id = hash_id;
  p.sym_id = sym_id;
  return p;
}

KdfParams KdfParams::forwarding(const Fingerprint& original,
                                std::uint8_t hash_id, std::uint8_t sym_id) {
  KdfParams p;
  p.version = 2;
  p.hash_id = hash_id;
  p.sym_id = sym_id;
  p.flags = kKdfFlagFingerprint;
  p.replacement_fingerprint = original;
  return p;
}

std::optional<Fingerprint> KdfParams::kdf_fingerprint_override() const {
  if (version == 2 && (flags & kKdfFlagFingerprint)) {
    return replacement_fingerprint;
  }
  return std::nullopt;
}

KdfParams parse_kdf_params(ByteView bytes) {
  ByteReader in(bytes);
  KdfParams p = read_kdf_params(in);
  in.expect_end("KDF params field");
  return p;
}

Bytes serialize_kdf_params(const KdfParams& params) {
  Bytes field;
  field.push_back(params.version);
  field.push_back(params.hash_id);
  field.push_back(params.sym_id);
  if (params.version == 2) {
    field.push_back(params.flags);
    const bool want_fp = params.flags & kKdfFlagFingerprint;
    if (want_fp != params.replacement_fingerprint.has_value()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "fingerprint presence must match flag 0x01");
    }
    if (want_fp) append(field, *params.replacement_fingerprint);
  } else if (params.version != 1) {
    throw Error(ErrorCode::kUnknownVersion,
                "KDF params version " + std::to_string(params.version));
  }
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(field.size()));
  append(out, field);
  return out;
}

Bytes serialize_packet(std::uint8_t tag, ByteView body) {
  if (tag == 0 || tag > 63) {
    throw Error(ErrorCode::kInvalidArgument, "packet tag out of range");
  }
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(0xC0 | tag));
  const std::size_t len = body.size();
  if (len < 192) {
    out.push_back(static_cast<std::uint8_t>(len));
  } else if (len < 8384) {
    out.push_back(static_cast<std::uint8_t>(((len - 192) >> 8) + 192));
    out.push_back(static_cast<std::uint8_t>((len - 192) & 0xFF));
  } else {
    out.push_back(0xFF);
    detail::put_u32(out, static_cast<std::uint32_t>(len));
  }
  append(out, body);
  return out;
}

std::vector<Packet> parse_packets(ByteView bytes) {
  ByteReader in(bytes);
  std::vector<Packet> packets;
  while (!in.empty()) {
    const std::uint8_t header = in.u8();
    if ((header & 0xC0) != 0xC0) {
      throw Error(ErrorCode::kMalformedPacket,
                  "only new-format packet headers are supported");
    }
    const std::uint8_t first = in.u8();
    std::size_t len = 0;
    if (first < 192) {
      len = first;
    } else if (first < 224) {
      len = ((first - 192) << 8) + in.u8() + 192;
      if (len < 192) {
        throw Error(ErrorCode::kMalformedPacket, "non-minimal length");
      }
    } else if (first == 255) {
      len = in.u32();
      if (len < 8384) {
        throw Error(ErrorCode::kMalformedPacket, "non-minimal length");
      }
    } else {
      throw Error(ErrorCode::kMalformedPacket,
                  "partial body lengths are not supported");
    }
    ByteView body = in.take(len);
    packets.push_back(
        Packet{static_cast<std::uint8_t>(header & 0x3F), Bytes(body.begin(), body.end())});
  }
  return packets;
}

Pkesk parse_pkesk_body(ByteView body) {
  ByteReader in(body);
  Pkesk p;
  p.version = in.u8();
  if (p.version != kPkeskVersion) {
    throw Error(ErrorCode::kMalformedPacket,
                "PKESK version " + std::to_string(p.version));
  }
  ByteView id = in.take(8);
  std::copy(id.begin(), id.end(), p.recipient_key_id.begin());
  p.pk_algorithm = in.u8();
  if (p.pk_algorithm != kPkAlgoEcdh) {
    throw Error(ErrorCode::kUnsupportedAlgorithm,
                "public-key algorithm " + std::to_string(p.pk_algorithm));
  }
  p.curve_oid = read_oid(in);
  p.ephemeral = read_native_point(in);
  const std::uint8_t wrapped_len = in.u8();
  ByteView wrapped = in.take(wrapped_len);
  p.wrapped_session_key.assign(wrapped.begin(), wrapped.end());
  in.expect_end("PKESK");
  return p;
}

Pkesk parse_pkesk(ByteView packet) {
  auto packets = parse_packets(packet);
  if (packets.size() != 1 || packets[0].tag != kTagPkesk) {
    throw Error(ErrorCode::kMalformedPacket, "expected a single PKESK packet");
  }
  return parse_pkesk_body(packets[0].body);
}

Bytes serialize_pkesk_body(const Pkesk& pkesk) {
  if (pkesk.wrapped_session_key.size() > 0xFF) {
    throw Error(ErrorCode::kInvalidArgument, "wrapped session key too long");
  }
  Bytes out;
  out.push_back(pkesk.version);
  append(out, pkesk.recipient_key_id);
  out.push_back(pkesk.pk_algorithm);
  put_oid(out, pkesk.curve_oid);
  put_native_point(out, pkesk.ephemeral);
  out.push_back(static_cast<std::uint8_t>(pkesk.wrapped_session_key.size()));
  append(out, pkesk.wrapped_session_key);
  return out;
}

Bytes serialize_pkesk(const Pkesk& pkesk) {
  return serialize_packet(kTagPkesk, serialize_pkesk_body(pkesk));
}

Pkesk rewrite_pkesk(const Pkesk& pkesk, const CurvePoint& new_ephemeral,
                    const KeyId& new_key_id) {
  Pkesk out = pkesk;
  out.ephemeral = new_ephemeral;
  out.recipient_key_id = new_key_id;
  return out;
}

EncryptedMessage parse_message(ByteView bytes) {
  auto packets = parse_packets(bytes);
  if (packets.size() < 2) {
    throw Error(ErrorCode::kMalformedPacket,
                "message needs a PKESK and a sealed payload");
  }
  EncryptedMessage msg;
  for (std::size_t i = 0; i + 1 < packets.size(); ++i) {
    if (packets[i].tag != kTagPkesk) {
      throw Error(ErrorCode::kMalformedPacket, "unexpected packet before payload");
    }
    msg.pkesks.push_back(parse_pkesk_body(packets[i].body));
  }
  if (packets.back().tag != kTagSealedPayload) {
    throw Error(ErrorCode::kMalformedPacket, "message must end with a payload");
  }
  msg.sealed_payload = std::move(packets.back().body);
  return msg;
}

Bytes serialize_message(const EncryptedMessage& message) {
  Bytes out;
  for (const Pkesk& p : message.pkesks) append(out, serialize_pkesk(p));
  append(out, serialize_packet(kTagSealedPayload, message.sealed_payload));
  return out;
}

Bytes serialize_public_key_body(const PublicKeyMaterial& key) {
  Bytes out;
  out.push_back(kPublicKeyVersion);
  out.push_back(kPkAlgoEcdh);
  put_oid(out, key.curve_oid);
  put_native_point(out, key.public_point);
  append(out, serialize_kdf_params(key.kdf));
  return out;
}

namespace {

PublicKeyMaterial read_public_key(ByteReader& in) {
  if (in.u8() != kPublicKeyVersion) {
    throw Error(ErrorCode::kMalformedPacket, "public key version must be 4");
  }
  if (in.u8() != kPkAlgoEcdh) {
    throw Error(ErrorCode::kUnsupportedAlgorithm, "key is not ECDH");
  }
  PublicKeyMaterial key;
  key.curve_oid = read_oid(in);
  key.public_point = read_native_point(in);
  key.kdf = read_kdf_params(in);
  return key;
}

}  // namespace

PublicKeyMaterial parse_public_key_body(ByteView body) {
  ByteReader in(body);
  PublicKeyMaterial key = read_public_key(in);
  in.expect_end("public key");
  return key;
}

Fingerprint fingerprint(const PublicKeyMaterial& key) {
  const Bytes body = serialize_public_key_body(key);
  Bytes framed;
  framed.push_back(0x99);
  put_u16(framed, static_cast<std::uint16_t>(body.size()));
  append(framed, body);
  const Bytes digest = detail::sha1(framed);
  Fingerprint fp{};
  std::copy(digest.begin(), digest.end(), fp.begin());
  return fp;
}

Bytes serialize_secret_key_body(const SecretKeyMaterial& key) {
  Bytes out = serialize_public_key_body(key.public_key);
  out.push_back(0x00);  // unprotected
  out.push_back(32);
  append(out, key.secret.raw());
  std::uint16_t sum = 0;
  for (std::uint8_t b : key.secret.raw()) sum = static_cast<std::uint16_t>(sum + b);
  put_u16(out, sum);
  return out;
}

SecretKeyMaterial parse_secret_key_body(ByteView body) {
  ByteReader in(body);
  PublicKeyMaterial pub = read_public_key(in);
  if (in.u8() != 0x00) {
    throw Error(ErrorCode::kUnsupportedAlgorithm,
                "protected secret keys are not supported");
  }
  if (in.u8() != 32) {
    throw Error(ErrorCode::kMalformedPacket, "secret must be 32 octets");
  }
  ByteView raw = in.take(32);
  std::uint16_t sum = 0;
  for (std::uint8_t b : raw) sum = static_cast<std::uint16_t>(sum + b);
  if (in.u16() != sum) {
    throw Error(ErrorCode::kMalformedPacket, "secret key checksum mismatch");
  }
  in.expect_end("secret key");

  ClampedSecret secret = ClampedSecret::clamp(raw.first<32>());
  if (!std::equal(raw.begin(), raw.end(), secret.raw().begin())) {
    throw Error(ErrorCode::kMalformedPacket, "secret is not clamped");
  }
  if (base_mul(secret) != pub.public_point) {
    throw Error(ErrorCode::kMalformedPacket,
                "public point does not match secret");
  }
  return SecretKeyMaterial{std::move(pub), secret};
}

}  // namespace pgpfwd
