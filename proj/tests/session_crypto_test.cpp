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

#include <functional>
#include <random>

#include <gtest/gtest.h>
#include <openssl/evp.h>

#include "pgpfwd/errors.hpp"
#include "test_support.hpp"

namespace pgpfwd {
namespace {

using testing_support::random_vector;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected pgpfwd::Error";
  return ErrorCode::kInvalidArgument;
}

Bytes seq(std::size_t n, std::uint8_t start = 0) {
  Bytes b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>(start + i);
  return b;
}

Fingerprint seq_fingerprint() {
  Fingerprint fp{};
  for (int i = 0; i < 20; ++i) fp[i] = static_cast<std::uint8_t>(i);
  return fp;
}

// Independent wrap via OpenSSL's built-in RFC 3394 cipher.
Bytes evp_wrap(ByteView kek, ByteView data) {
  const EVP_CIPHER* cipher = kek.size() == 16   ? EVP_aes_128_wrap()
                             : kek.size() == 24 ? EVP_aes_192_wrap()
                                                : EVP_aes_256_wrap();
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  Bytes out(data.size() + 8);
  int len = 0;
  EXPECT_EQ(EVP_EncryptInit_ex(ctx, cipher, nullptr, kek.data(), nullptr), 1);
  EXPECT_EQ(EVP_EncryptUpdate(ctx, out.data(), &len, data.data(),
                              static_cast<int>(data.size())),
            1);
  EVP_CIPHER_CTX_free(ctx);
  out.resize(static_cast<std::size_t>(len));
  return out;
}

KdfContext golden_context() {
  KdfContext ctx;
  ctx.fingerprint_for_kdf = seq_fingerprint();
  return ctx;
}

// --- KDF ------------------------------------------------------------------

// Values from tests/oracles/codec_oracle.py.
TEST(Kdf, GoldenSha256Aes256) {
  EXPECT_EQ(to_hex(derive_kek(CurvePoint::base_point(), golden_context())),
            "50437ff1f2d6da687f7e7088b33619f35c71f3ee237c160831790a5026464788");
}

TEST(Kdf, GoldenSha512Aes128) {
  KdfContext ctx = golden_context();
  ctx.kdf_hash_id = kHashSha512;
  ctx.kdf_sym_id = kSymAes128;
  EXPECT_EQ(to_hex(derive_kek(CurvePoint::base_point(), ctx)),
            "9790d212e18019de6d2bd6cc084cc244");
}

TEST(Kdf, InputBlockLayout) {
  Bytes block = kdf_input_block(CurvePoint::base_point(), golden_context());
  Bytes expected = from_hex("00000001");
  auto u = CurvePoint::base_point().bytes();
  expected.insert(expected.end(), u.begin(), u.end());
  for (const char* part : {"0a2b060104019755010501", "12", "03010809"}) {
    Bytes p = from_hex(part);
    expected.insert(expected.end(), p.begin(), p.end());
  }
  std::string anon = "Anonymous Sender    ";
  expected.insert(expected.end(), anon.begin(), anon.end());
  auto fp = seq_fingerprint();
  expected.insert(expected.end(), fp.begin(), fp.end());
  EXPECT_EQ(block, expected);
}

TEST(Kdf, Deterministic) {
  EXPECT_EQ(derive_kek(CurvePoint::base_point(), golden_context()),
            derive_kek(CurvePoint::base_point(), golden_context()));
}

TEST(Kdf, DependsOnEveryField) {
  const CurvePoint point = CurvePoint::base_point();
  const Bytes base = derive_kek(point, golden_context());

  for (int i = 0; i < 20; ++i) {
    KdfContext ctx = golden_context();
    ctx.fingerprint_for_kdf[i] ^= 0x01;
    EXPECT_NE(derive_kek(point, ctx), base) << "fingerprint octet " << i;
  }
  KdfContext oid = golden_context();
  oid.curve_oid.back() ^= 0x01;
  EXPECT_NE(derive_kek(point, oid), base);

  KdfContext hash = golden_context();
  hash.kdf_hash_id = kHashSha384;
  EXPECT_NE(derive_kek(point, hash).size(), 0u);
  EXPECT_NE(derive_kek(point, hash), base);

  // Same key length, different sym id: only the params octet changes.
  KdfContext sym = golden_context();
  sym.kdf_sym_id = kSymAes128;
  Bytes sym_kek = derive_kek(point, sym);
  EXPECT_NE(Bytes(base.begin(), base.begin() + 16), sym_kek);

  std::array<std::uint8_t, 32> u8{};
  u8[0] = 8;
  EXPECT_NE(derive_kek(CurvePoint::from_bytes(u8), golden_context()), base);
}

TEST(Kdf, TruncatesToWrapKeyLength) {
  KdfContext ctx = golden_context();
  for (auto [sym, len] : {std::pair{kSymAes128, 16u}, std::pair{kSymAes192, 24u},
                          std::pair{kSymAes256, 32u}}) {
    ctx.kdf_sym_id = sym;
    EXPECT_EQ(derive_kek(CurvePoint::base_point(), ctx).size(), len);
  }
}

TEST(Kdf, RejectsAllZeroPoint) {
  EXPECT_EQ(code_of([] {
              derive_kek(CurvePoint::identity(), golden_context());
            }),
            ErrorCode::kDegenerateSecret);
}

TEST(Kdf, UnknownAlgorithms) {
  KdfContext ctx = golden_context();
  ctx.kdf_hash_id = 0x02;
  EXPECT_EQ(code_of([&] { derive_kek(CurvePoint::base_point(), ctx); }),
            ErrorCode::kUnsupportedAlgorithm);
  ctx = golden_context();
  ctx.kdf_sym_id = 0x01;
  EXPECT_EQ(code_of([&] { derive_kek(CurvePoint::base_point(), ctx); }),
            ErrorCode::kUnsupportedAlgorithm);
}

// --- Key wrap -------------------------------------------------------------

TEST(KeyWrap, Rfc3394Vectors) {
  struct Vector {
    std::size_t kek_len;
    const char* data;
    const char* wrapped;
  };
  const Vector vectors[] = {
      {16, "00112233445566778899aabbccddeeff",
       "1fa68b0a8112b447aef34bd8fb5a7b829d3e862371d2cfe5"},
      {32, "00112233445566778899aabbccddeeff000102030405060708090a0b0c0d0e0f",
       "28c9f404c4b810f4cbccb35cfb87f8263f5786e2d80ed326cbc7f0e71a99f43b"
       "fb988b9b7a02dd21"},
  };
  for (const auto& v : vectors) {
    Bytes kek = seq(v.kek_len);
    Bytes data = from_hex(v.data);
    EXPECT_EQ(to_hex(aes_key_wrap(kek, data)), v.wrapped);
    EXPECT_EQ(to_hex(evp_wrap(kek, data)), v.wrapped);
    EXPECT_EQ(aes_key_unwrap(kek, from_hex(v.wrapped)), data);
  }
}

TEST(KeyWrap, MatchesOpenSslOnRandomInputs) {
  std::mt19937_64 rng(40);
  for (int i = 0; i < 300; ++i) {
    std::size_t kek_len = std::array<std::size_t, 3>{16, 24, 32}[rng() % 3];
    Bytes kek = random_vector(rng, kek_len);
    Bytes data = random_vector(rng, 8 * (2 + rng() % 8));
    Bytes ours = aes_key_wrap(kek, data);
    ASSERT_EQ(ours, evp_wrap(kek, data));
    ASSERT_EQ(aes_key_unwrap(kek, ours), data);
  }
}

TEST(KeyWrap, TamperAndWrongKey) {
  Bytes kek = seq(32);
  Bytes wrapped = aes_key_wrap(kek, seq(32, 0x40));
  Bytes bad = wrapped;
  bad[5] ^= 0x80;
  EXPECT_EQ(code_of([&] { aes_key_unwrap(kek, bad); }),
            ErrorCode::kUnwrapIntegrityFailure);
  Bytes other = kek;
  other[0] ^= 1;
  EXPECT_EQ(code_of([&] { aes_key_unwrap(other, wrapped); }),
            ErrorCode::kUnwrapIntegrityFailure);
  EXPECT_EQ(code_of([&] { aes_key_unwrap(kek, Bytes(12)); }),
            ErrorCode::kUnwrapIntegrityFailure);
}

TEST(SessionKeyWrap, RoundTripAllSuites) {
  SeededRandom rng(41);
  for (std::uint8_t algo : {kSymAes128, kSymAes192, kSymAes256}) {
    SessionKey sk = SessionKey::generate(rng, algo);
    EXPECT_EQ(sk.key.size(), sym_key_size(algo));
    Bytes kek = seq(32);
    Bytes wrapped = wrap_session_key(kek, sk);
    EXPECT_EQ(wrapped.size() % 8, 0u);
    EXPECT_EQ(unwrap_session_key(kek, wrapped), sk);
  }
}

TEST(SessionKeyWrap, WrongKekFails) {
  SeededRandom rng(42);
  SessionKey sk = SessionKey::generate(rng);
  Bytes wrapped = wrap_session_key(seq(32), sk);
  EXPECT_EQ(code_of([&] { unwrap_session_key(seq(32, 1), wrapped); }),
            ErrorCode::kUnwrapIntegrityFailure);
}

TEST(SessionKey, ValidatesLength) {
  SessionKey sk{kSymAes256, Bytes(16)};
  EXPECT_EQ(code_of([&] { sk.validate(); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { sym_key_size(0x02); }),
            ErrorCode::kUnsupportedAlgorithm);
}

// --- Payload --------------------------------------------------------------

TEST(Payload, RoundTrip) {
  SeededRandom rng(43);
  SessionKey sk = SessionKey::generate(rng);
  for (std::size_t n : {0u, 1u, 15u, 16u, 17u, 1000u}) {
    Bytes m = seq(n, 3);
    Bytes sealed = seal_payload(sk, m, rng);
    EXPECT_EQ(sealed.size(), 2 + 12 + n + 16);
    EXPECT_EQ(sealed[0], 0x01);
    EXPECT_EQ(sealed[1], kSymAes256);
    EXPECT_EQ(open_payload(sk, sealed), m);
  }
}

TEST(Payload, EveryFlippedOctetFails) {
  SeededRandom rng(44);
  SessionKey sk = SessionKey::generate(rng);
  Bytes sealed = seal_payload(sk, as_bytes("attack at dawn"), rng);
  for (std::size_t i = 0; i < sealed.size(); ++i) {
    Bytes bad = sealed;
    bad[i] ^= 0x01;
    EXPECT_EQ(code_of([&] { open_payload(sk, bad); }),
              ErrorCode::kPayloadAuthFailure)
        << "offset " << i;
  }
}

TEST(Payload, WrongKeyAndShortEnvelope) {
  SeededRandom rng(45);
  SessionKey sk = SessionKey::generate(rng);
  SessionKey other = SessionKey::generate(rng);
  Bytes sealed = seal_payload(sk, as_bytes("hello"), rng);
  EXPECT_EQ(code_of([&] { open_payload(other, sealed); }),
            ErrorCode::kPayloadAuthFailure);
  EXPECT_EQ(code_of([&] { open_payload(sk, Bytes(20)); }),
            ErrorCode::kPayloadAuthFailure);
}

// --- Messages -------------------------------------------------------------

TEST(Message, EncryptDecrypt) {
  SeededRandom rng(46);
  KeyPair bob = generate_keypair(rng);
  Bytes wire = encrypt_message(bob.public_key, as_bytes("for bob"), rng);
  EXPECT_EQ(to_string(decrypt_message(bob, wire)), "for bob");
  EncryptedMessage m = parse_message(wire);
  ASSERT_EQ(m.pkesks.size(), 1u);
  EXPECT_EQ(m.pkesks[0].recipient_key_id, bob.key_id);
}

TEST(Message, EncryptRejectsLowOrderRecipient) {
  SeededRandom rng(47);
  PublicKeyMaterial bad;
  bad.public_point = CurvePoint::identity();
  EXPECT_EQ(code_of([&] { encrypt_message(bad, as_bytes("x"), rng); }),
            ErrorCode::kInvalidRecipientKey);
}

TEST(Message, WrongRecipientIsNotFound) {
  SeededRandom rng(48);
  KeyPair bob = generate_keypair(rng);
  KeyPair eve = generate_keypair(rng);
  Bytes wire = encrypt_message(bob.public_key, as_bytes("x"), rng);
  EXPECT_EQ(code_of([&] { decrypt_message(eve, wire); }), ErrorCode::kNotFound);
}

// Forwarded decryption works only with the original recipient's fingerprint.
TEST(Message, ForwardedDecryptNeedsOriginalFingerprint) {
  SeededRandom rng(49);
  KeyPair bob = generate_keypair(rng);
  ForwardingGrant g = setup_forwarding(bob.secret, bob.fingerprint, rng);
  const KeyPair& charles = g.new_keypair;

  Bytes wire = encrypt_message(bob.public_key, as_bytes("forward me"), rng);
  EncryptedMessage m = parse_message(wire);
  const Bytes sealed_before = m.sealed_payload;
  m.pkesks[0] = rewrite_pkesk(
      m.pkesks[0], proxy_transform(g.proxy_factor, m.pkesks[0].ephemeral),
      charles.key_id);
  Bytes forwarded = serialize_message(m);
  EXPECT_EQ(parse_message(forwarded).sealed_payload, sealed_before);

  EXPECT_EQ(resolve_kdf_fingerprint(charles), bob.fingerprint);
  EXPECT_EQ(to_string(decrypt_message(charles, forwarded)), "forward me");
  EXPECT_EQ(to_string(decrypt_message(charles, forwarded, bob.fingerprint)),
            "forward me");
  EXPECT_EQ(code_of([&] {
              decrypt_message(charles, forwarded, charles.fingerprint);
            }),
            ErrorCode::kUnwrapIntegrityFailure);

  // A forwardee key carrying plain v1 params falls back to its own
  // fingerprint, which is the wrong one.
  KeyPair charles_v1 = keypair_from_secret(charles.secret);
  m.pkesks[0].recipient_key_id = charles_v1.key_id;
  EXPECT_EQ(code_of([&] { decrypt_message(charles_v1, serialize_message(m)); }),
            ErrorCode::kUnwrapIntegrityFailure);
  EXPECT_EQ(to_string(decrypt_message(charles_v1, serialize_message(m),
                                      bob.fingerprint)),
            "forward me");
}

}  // namespace
}  // namespace pgpfwd
