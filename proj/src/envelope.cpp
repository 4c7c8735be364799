#include "zkss/envelope.h"

#include <gmpxx.h>
#include <openssl/rand.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "zkss/errors.h"
#include "zkss/hash.h"

namespace zkss {
namespace {

constexpr size_t kHashSize = 32;
constexpr size_t kPrimeBits = RsaPublicKey::kModulusBits / 2;
constexpr unsigned kSieveLimit = 1u << 16;
constexpr unsigned kSieveWindow = 8192;  // odd offsets per window

mpz_class Import(ByteSpan bytes) {
  mpz_class z;
  mpz_import(z.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  return z;
}

Bytes Export(const mpz_class& z, size_t size) {
  size_t bytes = (mpz_sizeinbase(z.get_mpz_t(), 2) + 7) / 8;
  if (bytes > size) throw std::runtime_error("integer does not fit requested width");
  Bytes out(size, 0);
  size_t written = 0;
  mpz_export(out.data() + (size - bytes), &written, 1, 1, 1, 0, z.get_mpz_t());
  return out;
}

Bytes ExportMinimal(const mpz_class& z) {
  return Export(z, std::max<size_t>(1, (mpz_sizeinbase(z.get_mpz_t(), 2) + 7) / 8));
}

const std::vector<unsigned>& SmallPrimes() {
  static const std::vector<unsigned> primes = [] {
    std::vector<bool> composite(kSieveLimit, false);
    std::vector<unsigned> out;
    for (unsigned i = 3; i < kSieveLimit; i += 2) {
      if (composite[i]) continue;
      out.push_back(i);
      for (unsigned long j = static_cast<unsigned long>(i) * i; j < kSieveLimit; j += 2 * i) {
        composite[j] = true;
      }
    }
    return out;
  }();
  return primes;
}

bool IsProbablePrime(const mpz_class& candidate) {
  static const mpz_class two = 2;
  mpz_class exponent = candidate - 1;
  mpz_class residue;
  mpz_powm(residue.get_mpz_t(), two.get_mpz_t(), exponent.get_mpz_t(), candidate.get_mpz_t());
  if (residue != 1) return false;
  // Baillie-PSW plus one extra Miller-Rabin round.
  return mpz_probab_prime_p(candidate.get_mpz_t(), 25) != 0;
}

// Smallest prime >= start (odd search) with gcd(e, p - 1) == 1, using a
// small-prime sieve over windows of odd candidates.
mpz_class NextRsaPrime(mpz_class start) {
  if (mpz_even_p(start.get_mpz_t())) start += 1;
  const std::vector<unsigned>& primes = SmallPrimes();
  std::vector<uint8_t> sieve(kSieveWindow);
  for (;;) {
    std::fill(sieve.begin(), sieve.end(), 0);
    for (unsigned p : primes) {
      unsigned long r = mpz_fdiv_ui(start.get_mpz_t(), p);
      // start + 2i == 0 (mod p)  =>  i == (p - r) / 2 (mod p), p odd.
      unsigned long i = r == 0 ? 0 : ((p - r) % 2 == 0 ? (p - r) / 2 : (2 * p - r) / 2);
      for (; i < kSieveWindow; i += p) sieve[i] = 1;
    }
    for (unsigned i = 0; i < kSieveWindow; ++i) {
      if (sieve[i]) continue;
      mpz_class candidate = start + 2 * i;
      if (mpz_fdiv_ui(candidate.get_mpz_t(), RsaPublicKey::kExponent) == 1) continue;
      if (IsProbablePrime(candidate)) return candidate;
    }
    start += 2 * kSieveWindow;
  }
}

mpz_class RandomPrime(Drbg& rng) {
  for (;;) {
    Bytes raw = rng.NextBytes(kPrimeBits / 8);
    raw[0] |= 0xc0;  // top two bits set => p * q has exactly 2048 bits
    mpz_class prime = NextRsaPrime(Import(raw));
    if (mpz_sizeinbase(prime.get_mpz_t(), 2) == kPrimeBits) return prime;
  }
}

Bytes Mgf1(ByteSpan seed, size_t length) {
  Bytes out;
  out.reserve(length + kHashSize);
  for (uint32_t counter = 0; out.size() < length; ++counter) {
    std::array<uint8_t, 4> c = {static_cast<uint8_t>(counter >> 24),
                                static_cast<uint8_t>(counter >> 16),
                                static_cast<uint8_t>(counter >> 8), static_cast<uint8_t>(counter)};
    Digest block = Sha256({seed, c});
    Append(out, block);
  }
  out.resize(length);
  return out;
}

const Digest& EmptyLabelHash() {
  static const Digest hash = Sha256(ByteSpan());
  return hash;
}

DeliveryEnvelope EncryptWithSeed(ByteSpan plaintext, const RsaPublicKey& key, ByteSpan seed) {
  constexpr size_t k = RsaPublicKey::kModulusSize;
  if (plaintext.size() > kOaepCapacity) {
    throw SizeError("plaintext of " + std::to_string(plaintext.size()) +
                    " bytes exceeds OAEP capacity of " + std::to_string(kOaepCapacity));
  }
  if (key.modulus.size() != k) throw ParseError("RSA modulus must be 256 bytes");

  Bytes db;
  db.reserve(k - kHashSize - 1);
  Append(db, EmptyLabelHash());
  db.resize(k - kHashSize - 2 - plaintext.size(), 0);
  db.push_back(0x01);
  Append(db, plaintext);

  Bytes db_mask = Mgf1(seed, db.size());
  for (size_t i = 0; i < db.size(); ++i) db[i] ^= db_mask[i];
  Bytes seed_mask = Mgf1(db, kHashSize);
  Bytes masked_seed(seed.begin(), seed.end());
  for (size_t i = 0; i < kHashSize; ++i) masked_seed[i] ^= seed_mask[i];

  Bytes em;
  em.reserve(k);
  em.push_back(0x00);
  Append(em, masked_seed);
  Append(em, db);

  mpz_class n = Import(key.modulus);
  mpz_class m = Import(em);
  mpz_class e = key.exponent;
  mpz_class c;
  mpz_powm(c.get_mpz_t(), m.get_mpz_t(), e.get_mpz_t(), n.get_mpz_t());
  return DeliveryEnvelope{Export(c, k), key.Fingerprint()};
}

}  // namespace

std::array<uint8_t, RsaPublicKey::kEncodedSize> RsaPublicKey::Encode() const {
  if (modulus.size() != kModulusSize) throw ParseError("RSA modulus must be 256 bytes");
  std::array<uint8_t, kEncodedSize> out;
  std::copy(modulus.begin(), modulus.end(), out.begin());
  for (int i = 0; i < 4; ++i) {
    out[kModulusSize + i] = static_cast<uint8_t>(exponent >> (8 * (3 - i)));
  }
  return out;
}

RsaPublicKey RsaPublicKey::Decode(ByteSpan encoded) {
  if (encoded.size() != kEncodedSize) throw ParseError("RSA public key must be 260 bytes");
  RsaPublicKey key;
  key.modulus.assign(encoded.begin(), encoded.begin() + kModulusSize);
  key.exponent = 0;
  for (size_t i = kModulusSize; i < kEncodedSize; ++i) key.exponent = (key.exponent << 8) | encoded[i];
  return key;
}

FieldElement RsaPublicKey::Fingerprint() const { return HashToField(Encode()); }

RsaKeyPair RsaKeyPair::Generate(Drbg& rng) {
  mpz_class p = RandomPrime(rng);
  mpz_class q = RandomPrime(rng);
  while (q == p) q = RandomPrime(rng);
  if (p < q) std::swap(p, q);  // qinv convention: q^-1 mod p

  mpz_class n = p * q;
  mpz_class e = RsaPublicKey::kExponent;
  mpz_class p1 = p - 1;
  mpz_class q1 = q - 1;
  mpz_class lambda;
  mpz_lcm(lambda.get_mpz_t(), p1.get_mpz_t(), q1.get_mpz_t());
  mpz_class d, dp, dq, qinv;
  if (mpz_invert(d.get_mpz_t(), e.get_mpz_t(), lambda.get_mpz_t()) == 0 ||
      mpz_invert(qinv.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t()) == 0) {
    throw std::runtime_error("RSA key derivation failed");
  }
  dp = d % p1;
  dq = d % q1;

  RsaKeyPair kp;
  kp.public_key.modulus = Export(n, RsaPublicKey::kModulusSize);
  kp.public_key.exponent = RsaPublicKey::kExponent;
  kp.private_key = RsaPrivateKey{ExportMinimal(d),  ExportMinimal(p),  ExportMinimal(q),
                                 ExportMinimal(dp), ExportMinimal(dq), ExportMinimal(qinv)};
  return kp;
}

size_t RsaKeyPair::ModulusBits() const {
  return mpz_sizeinbase(Import(public_key.modulus).get_mpz_t(), 2);
}

nlohmann::json ToJson(const DeliveryEnvelope& envelope) {
  return {{"ciphertext", ToBase64(envelope.ciphertext)},
          {"recipientKeyFingerprint", envelope.recipient_fingerprint.ToHex()}};
}

DeliveryEnvelope DeliveryEnvelopeFromJson(const nlohmann::json& j) {
  return DeliveryEnvelope{
      FromBase64(j.at("ciphertext").get<std::string>()),
      FieldElement::FromHex(j.at("recipientKeyFingerprint").get<std::string>())};
}

DeliveryEnvelope EncryptDeliveryAddress(ByteSpan plaintext, const RsaPublicKey& key, Drbg& rng) {
  Bytes seed = rng.NextBytes(kHashSize);
  return EncryptWithSeed(plaintext, key, seed);
}

DeliveryEnvelope EncryptDeliveryAddress(ByteSpan plaintext, const RsaPublicKey& key) {
  Bytes seed(kHashSize);
  if (RAND_bytes(seed.data(), static_cast<int>(seed.size())) != 1) {
    throw std::runtime_error("system RNG failure");
  }
  return EncryptWithSeed(plaintext, key, seed);
}

Bytes DecryptDeliveryAddress(const DeliveryEnvelope& envelope, const RsaKeyPair& key) {
  constexpr size_t k = RsaPublicKey::kModulusSize;
  const PaddingError failure("OAEP decoding failed");
  if (envelope.ciphertext.size() != k) throw failure;

  mpz_class n = Import(key.public_key.modulus);
  mpz_class c = Import(envelope.ciphertext);
  if (c >= n) throw failure;

  const RsaPrivateKey& priv = key.private_key;
  mpz_class p = Import(priv.p), q = Import(priv.q);
  mpz_class dp = Import(priv.dp), dq = Import(priv.dq), qinv = Import(priv.qinv);
  mpz_class m1, m2;
  mpz_powm(m1.get_mpz_t(), c.get_mpz_t(), dp.get_mpz_t(), p.get_mpz_t());
  mpz_powm(m2.get_mpz_t(), c.get_mpz_t(), dq.get_mpz_t(), q.get_mpz_t());
  mpz_class h = (qinv * (m1 - m2)) % p;
  if (h < 0) h += p;
  mpz_class m = m2 + h * q;

  Bytes em = Export(m, k);
  ByteSpan masked_seed(em.data() + 1, kHashSize);
  ByteSpan masked_db(em.data() + 1 + kHashSize, k - kHashSize - 1);
  Bytes seed_mask = Mgf1(masked_db, kHashSize);
  Bytes seed(masked_seed.begin(), masked_seed.end());
  for (size_t i = 0; i < kHashSize; ++i) seed[i] ^= seed_mask[i];
  Bytes db(masked_db.begin(), masked_db.end());
  Bytes db_mask = Mgf1(seed, db.size());
  for (size_t i = 0; i < db.size(); ++i) db[i] ^= db_mask[i];

  bool ok = em[0] == 0 && std::equal(EmptyLabelHash().begin(), EmptyLabelHash().end(), db.begin());
  size_t separator = kHashSize;
  while (separator < db.size() && db[separator] == 0) ++separator;
  ok = ok && separator < db.size() && db[separator] == 0x01;
  if (!ok) throw failure;
  return Bytes(db.begin() + static_cast<std::ptrdiff_t>(separator) + 1, db.end());
}

}  // namespace zkss
