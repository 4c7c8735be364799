#include <gtest/gtest.h>

#define OPENSSL_SUPPRESS_DEPRECATED
#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/ecdsa.h>
#include <openssl/obj_mac.h>

#include "test_support.h"
#include "zkss/drbg.h"
#include "zkss/errors.h"
#include "zkss/signing.h"

namespace zkss {
namespace {

using testing::Gen;
using testing::GoldenVectors;

Scalar ScalarFromHex(const std::string& hex) {
  Bytes b = FromHexFixed(hex, 32);
  Scalar s;
  std::copy(b.begin(), b.end(), s.begin());
  return s;
}

Message MessageFromBytes(const Bytes& raw) {
  Message m;
  std::copy(raw.begin(), raw.end(), m.bytes.begin());
  return m;
}

// Plain ECDSA verification through OpenSSL's own verifier, independent of
// recovery.
bool OpenSslVerify(const KeyPair& key, const Digest& digest, const Signature& sig) {
  EC_KEY* ec = EC_KEY_new_by_curve_name(NID_secp256k1);
  const EC_GROUP* group = EC_KEY_get0_group(ec);
  EC_POINT* point = EC_POINT_new(group);
  Bytes encoded{0x04};
  encoded.insert(encoded.end(), key.public_key().begin(), key.public_key().end());
  EC_POINT_oct2point(group, point, encoded.data(), encoded.size(), nullptr);
  EC_KEY_set_public_key(ec, point);
  ECDSA_SIG* s = ECDSA_SIG_new();
  ECDSA_SIG_set0(s, BN_bin2bn(sig.r.data(), 32, nullptr), BN_bin2bn(sig.s.data(), 32, nullptr));
  int ok = ECDSA_do_verify(digest.data(), static_cast<int>(digest.size()), s, ec);
  ECDSA_SIG_free(s);
  EC_POINT_free(point);
  EC_KEY_free(ec);
  return ok == 1;
}

TEST(Rfc6979, GoldenVectorsBitExact) {
  const auto& vectors = GoldenVectors().at("rfc6979");
  ASSERT_GE(vectors.size(), 10u);
  for (const auto& v : vectors) {
    KeyPair key = KeyPair::FromSecret(FromHex(v.at("secret").get<std::string>()));
    Bytes message = FromHex(v.at("message").get<std::string>());
    Digest digest = Sha256(message);
    EXPECT_EQ(zkss::ToHex(digest), "0x" + v.at("digest").get<std::string>());
    EXPECT_EQ(zkss::ToHex(Rfc6979Nonce(key.secret(), digest)), v.at("k").get<std::string>());
    EXPECT_EQ(key.address().ToHex(), v.at("address").get<std::string>());

    Signature expected{ScalarFromHex(v.at("r").get<std::string>()), ScalarFromHex(v.at("s").get<std::string>()),
                       static_cast<uint8_t>(v.at("recovery_id").get<int>())};
    EXPECT_TRUE(expected.IsLowS());
    EXPECT_EQ(DeriveAddress(RecoverPublicKey(expected, digest)), key.address());
    EXPECT_EQ(CommitmentHash(expected).value.ToHex(), v.at("commitment").get<std::string>());
    EXPECT_EQ(DeriveNullifier(expected).value.ToHex(), v.at("nullifier").get<std::string>());

    if (message.size() == Message{}.bytes.size()) {
      Message m = MessageFromBytes(message);
      Signature sig = SignDeterministic(key, m);
      EXPECT_EQ(sig, expected) << v.at("message").get<std::string>();
      EXPECT_EQ(Ecrecover(sig, m), key.address());
    }
  }
}

TEST(Rfc6979, KnownBitcoinVector) {
  // Widely published secp256k1/SHA-256 vector: d = 1, "Satoshi Nakamoto".
  Scalar one{};
  one[31] = 1;
  Digest digest = Sha256(AsBytes("Satoshi Nakamoto"));
  EXPECT_EQ(zkss::ToHex(Rfc6979Nonce(one, digest)),
            "0x8f8a276c19f4149656b280621e358cce24f5f52542772691ee69063b74f15d15");
}

TEST(Signing, DeterministicAndLowS) {
  Drbg rng("signing-test", 1);
  Gen gen(31);
  for (int i = 0; i < 60; ++i) {
    KeyPair key = KeyPair::Generate(rng);
    Message m = MessageFromBytes(gen.RandomBytes(72));
    Signature a = SignDeterministic(key, m);
    Signature b = SignDeterministic(key, m);
    EXPECT_EQ(a, b);
    EXPECT_TRUE(a.IsWellFormed());
    EXPECT_TRUE(a.IsLowS());
    EXPECT_EQ(Ecrecover(a, m), key.address());
    EXPECT_TRUE(OpenSslVerify(key, MessageDigest(m), a));
    EXPECT_EQ(DeriveNullifier(a), DeriveNullifier(b));
  }
}

TEST(Signing, RandomNonceSignaturesDifferButVerify) {
  Drbg rng("signing-test", 2);
  KeyPair key = KeyPair::Generate(rng);
  Message m = BuildMessage(key.address(), EventId::Create(key.address(), 1));
  Signature det = SignDeterministic(key, m);
  for (int i = 0; i < 20; ++i) {
    Scalar k{};
    rng.Fill(k);
    Signature sig = SignWithNonce(key, m, k);
    EXPECT_TRUE(sig.IsLowS());
    EXPECT_EQ(Ecrecover(sig, m), key.address());
    EXPECT_NE(DeriveNullifier(sig), DeriveNullifier(det));
    EXPECT_NE(CommitmentHash(sig), CommitmentHash(det));
  }
  EXPECT_EQ(SignWithNonce(key, m, Rfc6979Nonce(key.secret(), MessageDigest(m))), det);
  EXPECT_THROW(SignWithNonce(key, m, Scalar{}), RangeError);
}

TEST(Signing, MirroredSignaturesRejected) {
  Drbg rng("signing-test", 3);
  for (int i = 0; i < 100; ++i) {
    KeyPair key = KeyPair::Generate(rng);
    Message m = BuildMessage(key.address(), EventId::Create(key.address(), i));
    Signature sig = SignDeterministic(key, m);
    Signature high = sig.Mirrored();
    EXPECT_TRUE(high.IsWellFormed());
    EXPECT_FALSE(high.IsLowS());
    EXPECT_EQ(high.Mirrored(), sig);
    // The twin is a mathematically valid ECDSA signature...
    EXPECT_TRUE(OpenSslVerify(key, MessageDigest(m), high));
    // ...which recovery refuses.
    EXPECT_THROW(Ecrecover(high, m), MalleabilityError);
    EXPECT_NE(DeriveNullifier(high), DeriveNullifier(sig));
  }
}

TEST(Signing, MalformedSignaturesRejected) {
  Drbg rng("signing-test", 4);
  KeyPair key = KeyPair::Generate(rng);
  Message m = BuildMessage(key.address(), EventId::Create(key.address(), 1));
  Signature sig = SignDeterministic(key, m);

  Signature zero_r = sig;
  zero_r.r = Scalar{};
  EXPECT_THROW(Ecrecover(zero_r, m), RecoveryError);
  Signature zero_s = sig;
  zero_s.s = Scalar{};
  EXPECT_THROW(Ecrecover(zero_s, m), RecoveryError);
  Signature bad_v = sig;
  bad_v.recovery_id = 2;
  EXPECT_THROW(Ecrecover(bad_v, m), RecoveryError);
  Signature big_r = sig;
  big_r.r.fill(0xff);
  EXPECT_THROW(Ecrecover(big_r, m), RecoveryError);

  Signature flipped = sig;
  flipped.recovery_id ^= 1;
  Address recovered;
  try {
    recovered = Ecrecover(flipped, m);
  } catch (const RecoveryError&) {
  }
  EXPECT_NE(recovered, key.address());
}

TEST(Signing, SerializationRoundTrip) {
  Drbg rng("signing-test", 5);
  KeyPair key = KeyPair::Generate(rng);
  Signature sig = SignDeterministic(key, BuildMessage(key.address(), EventId::Create(key.address(), 9)));
  auto bytes = sig.Serialize();
  EXPECT_EQ(bytes.size(), 65u);
  EXPECT_EQ(bytes[64], sig.recovery_id);
  EXPECT_EQ(Signature::FromBytes(bytes), sig);
  EXPECT_EQ(Signature::FromHex(sig.ToHex()), sig);
  EXPECT_THROW(Signature::FromBytes(Bytes(64, 1)), ParseError);
  EXPECT_EQ(CommitmentHash(sig).value, HashToField(bytes));
  EXPECT_EQ(DeriveNullifier(sig).value, HashToField(sig.s));
}

TEST(KeyPair, SecretRange) {
  EXPECT_THROW(KeyPair::FromSecret(Bytes(32, 0)), RangeError);
  EXPECT_THROW(KeyPair::FromSecret(FieldElement::Modulus()), RangeError);
  EXPECT_THROW(KeyPair::FromSecret(Bytes(31, 1)), ParseError);
  Drbg a("keys", 7), b("keys", 7);
  EXPECT_EQ(KeyPair::Generate(a).address(), KeyPair::Generate(b).address());
}

TEST(KeyPair, DistinctEventsGiveDistinctNullifiers) {
  Drbg rng("signing-test", 6);
  KeyPair key = KeyPair::Generate(rng);
  Address contract = Address::FromHex("0x5fbdb2315678afecb367f032d93f642f64180aa3");
  std::set<Nullifier> seen;
  for (uint64_t nonce = 0; nonce < 50; ++nonce) {
    Signature sig = SignDeterministic(key, BuildMessage(key.address(), EventId::Create(contract, nonce)));
    EXPECT_TRUE(seen.insert(DeriveNullifier(sig)).second);
  }
}

}  // namespace
}  // namespace zkss
