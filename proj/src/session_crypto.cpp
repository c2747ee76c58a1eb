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

#include "pgpfwd/session_crypto.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <string_view>

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include "byte_reader.hpp"
#include "digest.hpp"
#include "pgpfwd/errors.hpp"

namespace pgpfwd {

using detail::append;

namespace {

constexpr std::array<std::uint8_t, 8> kWrapIv = {0xA6, 0xA6, 0xA6, 0xA6,
                                                 0xA6, 0xA6, 0xA6, 0xA6};
constexpr std::string_view kAnonymousSender = "Anonymous Sender    ";
constexpr std::uint8_t kPayloadVersion = 1;
constexpr std::size_t kGcmNonceSize = 12;
constexpr std::size_t kGcmTagSize = 16;

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

CipherCtx new_ctx() {
  CipherCtx ctx(EVP_CIPHER_CTX_new(), &EVP_CIPHER_CTX_free);
  if (!ctx) throw Error(ErrorCode::kIoFailure, "EVP_CIPHER_CTX_new failed");
  return ctx;
}

const EVP_CIPHER* ecb_for_key(std::size_t key_size) {
  switch (key_size) {
    case 16: return EVP_aes_128_ecb();
    case 24: return EVP_aes_192_ecb();
    case 32: return EVP_aes_256_ecb();
    default:
      throw Error(ErrorCode::kInvalidArgument,
                  "AES key must be 16, 24 or 32 octets");
  }
}

const EVP_CIPHER* gcm_for_key(std::size_t key_size) {
  switch (key_size) {
    case 16: return EVP_aes_128_gcm();
    case 24: return EVP_aes_192_gcm();
    case 32: return EVP_aes_256_gcm();
    default:
      throw Error(ErrorCode::kInvalidArgument,
                  "AES key must be 16, 24 or 32 octets");
  }
}

// One raw AES block operation per call, no padding.
class AesBlock {
 public:
  AesBlock(ByteView key, bool encrypt) : ctx_(new_ctx()) {
    if (EVP_CipherInit_ex(ctx_.get(), ecb_for_key(key.size()), nullptr,
                          key.data(), nullptr, encrypt ? 1 : 0) != 1) {
      throw Error(ErrorCode::kIoFailure, "AES init failed");
    }
    EVP_CIPHER_CTX_set_padding(ctx_.get(), 0);
  }

  void apply(std::array<std::uint8_t, 16>& block) {
    int len = 0;
    if (EVP_CipherUpdate(ctx_.get(), block.data(), &len, block.data(), 16) != 1 ||
        len != 16) {
      throw Error(ErrorCode::kIoFailure, "AES block operation failed");
    }
  }

 private:
  CipherCtx ctx_;
};

void xor_counter(std::uint8_t* a, std::uint64_t t) {
  for (int i = 7; i >= 0; --i) {
    a[i] ^= static_cast<std::uint8_t>(t);
    t >>= 8;
  }
}

std::uint16_t checksum16(ByteView data) {
  std::uint16_t sum = 0;
  for (std::uint8_t b : data) sum = static_cast<std::uint16_t>(sum + b);
  return sum;
}

}  // namespace

std::size_t sym_key_size(std::uint8_t sym_id) {
  switch (sym_id) {
    case kSymAes128: return 16;
    case kSymAes192: return 24;
    case kSymAes256: return 32;
    default:
      throw Error(ErrorCode::kUnsupportedAlgorithm,
                  "symmetric algorithm " + std::to_string(sym_id));
  }
}

void SessionKey::validate() const {
  if (key.size() != sym_key_size(algorithm_id)) {
    throw Error(ErrorCode::kInvalidArgument,
                "session key length does not match its algorithm");
  }
}

SessionKey SessionKey::generate(RandomSource& rng, std::uint8_t algorithm_id) {
  SessionKey sk;
  sk.algorithm_id = algorithm_id;
  sk.key.resize(sym_key_size(algorithm_id));
  rng.fill(sk.key);
  return sk;
}

Bytes kdf_input_block(const CurvePoint& shared_point, const KdfContext& ctx) {
  Bytes block = {0x00, 0x00, 0x00, 0x01};
  append(block, shared_point.bytes());
  block.push_back(static_cast<std::uint8_t>(ctx.curve_oid.size()));
  append(block, ctx.curve_oid);
  block.push_back(kPkAlgoEcdh);
  // Always the v1 shape, so a forwardee with v2 params derives the same KEK
  // as the original recipient.
  block.insert(block.end(), {0x03, 0x01, ctx.kdf_hash_id, ctx.kdf_sym_id});
  append(block, as_bytes(kAnonymousSender));
  append(block, ctx.fingerprint_for_kdf);
  return block;
}

Bytes derive_kek(const CurvePoint& shared_point, const KdfContext& ctx) {
  if (shared_point.is_identity()) {
    throw Error(ErrorCode::kDegenerateSecret, "all-zero shared point");
  }
  const std::size_t key_size = sym_key_size(ctx.kdf_sym_id);
  Bytes block = kdf_input_block(shared_point, ctx);
  Bytes digest = detail::digest_by_id(ctx.kdf_hash_id, block);
  secure_zero(block);
  digest.resize(key_size);
  return digest;
}

Bytes aes_key_wrap(ByteView kek, ByteView plaintext) {
  if (plaintext.size() < 16 || plaintext.size() % 8 != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "key wrap input must be >= 16 octets and a multiple of 8");
  }
  AesBlock aes(kek, /*encrypt=*/true);
  const std::size_t n = plaintext.size() / 8;
  Bytes out(8 + plaintext.size());
  std::copy(kWrapIv.begin(), kWrapIv.end(), out.begin());
  std::copy(plaintext.begin(), plaintext.end(), out.begin() + 8);

  std::array<std::uint8_t, 16> b{};
  for (std::uint64_t j = 0; j < 6; ++j) {
    for (std::size_t i = 1; i <= n; ++i) {
      std::copy_n(out.begin(), 8, b.begin());
      std::copy_n(out.begin() + 8 * i, 8, b.begin() + 8);
      aes.apply(b);
      xor_counter(b.data(), n * j + i);
      std::copy_n(b.begin(), 8, out.begin());
      std::copy_n(b.begin() + 8, 8, out.begin() + 8 * i);
    }
  }
  OPENSSL_cleanse(b.data(), b.size());
  return out;
}

Bytes aes_key_unwrap(ByteView kek, ByteView wrapped) {
  if (wrapped.size() < 24 || wrapped.size() % 8 != 0) {
    throw Error(ErrorCode::kUnwrapIntegrityFailure,
                "wrapped key has an invalid length");
  }
  AesBlock aes(kek, /*encrypt=*/false);
  const std::size_t n = wrapped.size() / 8 - 1;
  Bytes buf(wrapped.begin(), wrapped.end());

  std::array<std::uint8_t, 16> b{};
  for (std::uint64_t j = 6; j-- > 0;) {
    for (std::size_t i = n; i >= 1; --i) {
      std::copy_n(buf.begin(), 8, b.begin());
      xor_counter(b.data(), n * j + i);
      std::copy_n(buf.begin() + 8 * i, 8, b.begin() + 8);
      aes.apply(b);
      std::copy_n(b.begin(), 8, buf.begin());
      std::copy_n(b.begin() + 8, 8, buf.begin() + 8 * i);
    }
  }
  OPENSSL_cleanse(b.data(), b.size());
  if (CRYPTO_memcmp(buf.data(), kWrapIv.data(), 8) != 0) {
    secure_zero(buf);
    throw Error(ErrorCode::kUnwrapIntegrityFailure,
                "key wrap integrity check failed");
  }
  return Bytes(buf.begin() + 8, buf.end());
}

Bytes wrap_session_key(ByteView kek, const SessionKey& sk) {
  sk.validate();
  Bytes m;
  m.push_back(sk.algorithm_id);
  append(m, sk.key);
  detail::put_u16(m, checksum16(sk.key));
  const std::uint8_t pad = static_cast<std::uint8_t>(8 - m.size() % 8);
  m.insert(m.end(), pad, pad);
  Bytes wrapped = aes_key_wrap(kek, m);
  secure_zero(m);
  return wrapped;
}

SessionKey unwrap_session_key(ByteView kek, ByteView wrapped) {
  Bytes m = aes_key_unwrap(kek, wrapped);
  auto fail = [&m](const char* why) {
    secure_zero(m);
    return Error(ErrorCode::kUnwrapIntegrityFailure, why);
  };
  const std::uint8_t pad = m.back();
  if (pad == 0 || pad > 8 || pad > m.size()) throw fail("bad padding");
  for (std::size_t i = m.size() - pad; i < m.size(); ++i) {
    if (m[i] != pad) throw fail("bad padding");
  }
  const std::size_t body = m.size() - pad;
  if (body < 3) throw fail("session key too short");
  SessionKey sk;
  sk.algorithm_id = m[0];
  std::size_t key_size = 0;
  try {
    key_size = sym_key_size(sk.algorithm_id);
  } catch (const Error&) {
    throw fail("unknown session key algorithm");
  }
  if (body != 1 + key_size + 2) throw fail("session key length mismatch");
  sk.key.assign(m.begin() + 1, m.begin() + 1 + static_cast<std::ptrdiff_t>(key_size));
  const std::uint16_t stored = static_cast<std::uint16_t>(
      (m[1 + key_size] << 8) | m[2 + key_size]);
  if (stored != checksum16(sk.key)) throw fail("session key checksum mismatch");
  secure_zero(m);
  return sk;
}

Bytes seal_payload(const SessionKey& sk, ByteView plaintext,
                   RandomSource& rng) {
  sk.validate();
  Bytes out = {kPayloadVersion, sk.algorithm_id};
  std::array<std::uint8_t, kGcmNonceSize> nonce{};
  rng.fill(nonce);
  append(out, nonce);

  CipherCtx ctx = new_ctx();
  int len = 0;
  if (EVP_EncryptInit_ex(ctx.get(), gcm_for_key(sk.key.size()), nullptr,
                         nullptr, nullptr) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kGcmNonceSize,
                          nullptr) != 1 ||
      EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, sk.key.data(),
                         nonce.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, out.data(), 2) != 1) {
    throw Error(ErrorCode::kIoFailure, "AES-GCM init failed");
  }
  const std::size_t header = out.size();
  out.resize(header + plaintext.size() + kGcmTagSize);
  if (!plaintext.empty() &&
      EVP_EncryptUpdate(ctx.get(), out.data() + header, &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1) {
    throw Error(ErrorCode::kIoFailure, "AES-GCM encrypt failed");
  }
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + header + plaintext.size(),
                          &len) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kGcmTagSize,
                          out.data() + header + plaintext.size()) != 1) {
    throw Error(ErrorCode::kIoFailure, "AES-GCM finalize failed");
  }
  return out;
}

Bytes open_payload(const SessionKey& sk, ByteView sealed) {
  constexpr std::size_t kHeader = 2 + kGcmNonceSize;
  if (sealed.size() < kHeader + kGcmTagSize || sealed[0] != kPayloadVersion) {
    throw Error(ErrorCode::kPayloadAuthFailure, "malformed sealed payload");
  }
  if (sealed[1] != sk.algorithm_id || sk.key.size() != sym_key_size(sk.algorithm_id)) {
    throw Error(ErrorCode::kPayloadAuthFailure, "session key algorithm mismatch");
  }
  const std::size_t ct_len = sealed.size() - kHeader - kGcmTagSize;
  Bytes plain(ct_len);
  Bytes tag(sealed.end() - kGcmTagSize, sealed.end());

  CipherCtx ctx = new_ctx();
  int len = 0;
  bool ok =
      EVP_DecryptInit_ex(ctx.get(), gcm_for_key(sk.key.size()), nullptr,
                         nullptr, nullptr) == 1 &&
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kGcmNonceSize,
                          nullptr) == 1 &&
      EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, sk.key.data(),
                         sealed.data() + 2) == 1 &&
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, sealed.data(), 2) == 1;
  if (ok && ct_len > 0) {
    ok = EVP_DecryptUpdate(ctx.get(), plain.data(), &len,
                           sealed.data() + kHeader,
                           static_cast<int>(ct_len)) == 1;
  }
  ok = ok && EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kGcmTagSize,
                                 tag.data()) == 1;
  ok = ok && EVP_DecryptFinal_ex(ctx.get(), plain.data() + ct_len, &len) == 1;
  if (!ok) {
    secure_zero(plain);
    throw Error(ErrorCode::kPayloadAuthFailure, "payload authentication failed");
  }
  return plain;
}

Bytes encrypt_message(const PublicKeyMaterial& recipient, ByteView plaintext,
                      RandomSource& rng) {
  const Fingerprint fp = fingerprint(recipient);
  Encapsulation enc = sender_encapsulate(recipient.public_point, rng);

  KdfContext ctx;
  ctx.curve_oid = recipient.curve_oid;
  ctx.kdf_hash_id = recipient.kdf.hash_id;
  ctx.kdf_sym_id = recipient.kdf.sym_id;
  ctx.fingerprint_for_kdf = fp;
  Bytes kek = derive_kek(enc.shared_secret, ctx);

  SessionKey sk = SessionKey::generate(rng);
  Pkesk pkesk;
  pkesk.recipient_key_id = key_id_of(fp);
  pkesk.curve_oid = recipient.curve_oid;
  pkesk.ephemeral = enc.ephemeral;
  pkesk.wrapped_session_key = wrap_session_key(kek, sk);
  secure_zero(kek);

  EncryptedMessage msg;
  msg.pkesks.push_back(std::move(pkesk));
  msg.sealed_payload = seal_payload(sk, plaintext, rng);
  secure_zero(sk.key);
  return serialize_message(msg);
}

Fingerprint resolve_kdf_fingerprint(const KeyPair& key) {
  return key.public_key.kdf.kdf_fingerprint_override().value_or(key.fingerprint);
}

Bytes decrypt_message(const KeyPair& key, ByteView message,
                      std::optional<Fingerprint> kdf_fingerprint) {
  const EncryptedMessage msg = parse_message(message);
  auto it = std::find_if(msg.pkesks.begin(), msg.pkesks.end(),
                         [&](const Pkesk& p) {
                           return p.recipient_key_id == key.key_id;
                         });
  if (it == msg.pkesks.end()) {
    throw Error(ErrorCode::kNotFound, "no PKESK addressed to key " +
                                          to_hex(key.key_id));
  }
  const CurvePoint shared = receiver_decapsulate(key.secret, it->ephemeral);

  KdfContext ctx;
  ctx.curve_oid = it->curve_oid;
  ctx.kdf_hash_id = key.public_key.kdf.hash_id;
  ctx.kdf_sym_id = key.public_key.kdf.sym_id;
  ctx.fingerprint_for_kdf = kdf_fingerprint.value_or(resolve_kdf_fingerprint(key));
  Bytes kek = derive_kek(shared, ctx);
  SessionKey sk = unwrap_session_key(kek, it->wrapped_session_key);
  secure_zero(kek);
  Bytes plain = open_payload(sk, msg.sealed_payload);
  secure_zero(sk.key);
  return plain;
}

}  // namespace pgpfwd
