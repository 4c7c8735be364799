#ifndef ZKSS_ENVELOPE_H_
#define ZKSS_ENVELOPE_H_

#include <array>
#include <cstdint>

#include "json.hpp"
#include "zkss/bytes.h"
#include "zkss/drbg.h"
#include "zkss/primitives.h"

namespace zkss {

struct RsaPublicKey {
  static constexpr size_t kModulusBits = 2048;
  static constexpr size_t kModulusSize = kModulusBits / 8;
  static constexpr uint32_t kExponent = 65537;
  // 256-byte big-endian modulus || 4-byte big-endian exponent.
  static constexpr size_t kEncodedSize = kModulusSize + 4;

  Bytes modulus;  // kModulusSize bytes, big-endian
  uint32_t exponent = kExponent;

  std::array<uint8_t, kEncodedSize> Encode() const;
  static RsaPublicKey Decode(ByteSpan encoded);

  // hashToField(Encode()); this is the randomness anchor r a sender publishes.
  FieldElement Fingerprint() const;

  bool operator==(const RsaPublicKey&) const = default;
};

// CRT private key; all values big-endian.
struct RsaPrivateKey {
  Bytes d, p, q, dp, dq, qinv;
};

struct RsaKeyPair {
  RsaPublicKey public_key;
  RsaPrivateKey private_key;

  // Deterministic in the stream: the same seed yields the same key pair.
  static RsaKeyPair Generate(Drbg& rng);
  size_t ModulusBits() const;
};

struct DeliveryEnvelope {
  Bytes ciphertext;  // kModulusSize bytes
  FieldElement recipient_fingerprint;

  bool operator==(const DeliveryEnvelope&) const = default;
};

nlohmann::json ToJson(const DeliveryEnvelope& envelope);
DeliveryEnvelope DeliveryEnvelopeFromJson(const nlohmann::json& j);

// RSA-OAEP with SHA-256 and MGF1-SHA-256, empty label: k - 2*hLen - 2.
inline constexpr size_t kOaepCapacity = RsaPublicKey::kModulusSize - 2 * 32 - 2;

// Throws SizeError above kOaepCapacity. The OAEP seed is drawn from `rng`.
DeliveryEnvelope EncryptDeliveryAddress(ByteSpan plaintext, const RsaPublicKey& key, Drbg& rng);
// Same, with an OAEP seed from the system CSPRNG.
DeliveryEnvelope EncryptDeliveryAddress(ByteSpan plaintext, const RsaPublicKey& key);

// Throws PaddingError for a wrong key or corrupted ciphertext.
Bytes DecryptDeliveryAddress(const DeliveryEnvelope& envelope, const RsaKeyPair& key);

}  // namespace zkss

#endif  // ZKSS_ENVELOPE_H_
