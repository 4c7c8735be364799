#ifndef ZKSS_SIGNING_H_
#define ZKSS_SIGNING_H_

#include <array>
#include <compare>
#include <string>

#include "zkss/drbg.h"
#include "zkss/hash.h"
#include "zkss/primitives.h"

namespace zkss {

using Scalar = std::array<uint8_t, 32>;

// secp256k1 key with its derived account address.
class KeyPair {
 public:
  static constexpr size_t kPublicKeySize = 64;  // X || Y, no 0x04 prefix
  using PublicKey = std::array<uint8_t, kPublicKeySize>;

  // Throws RangeError unless 1 <= secret < n.
  static KeyPair FromSecret(ByteSpan secret);
  static KeyPair Generate(Drbg& rng);

  const Scalar& secret() const { return secret_; }
  const PublicKey& public_key() const { return public_key_; }
  const Address& address() const { return address_; }

 private:
  KeyPair() = default;

  Scalar secret_{};
  PublicKey public_key_{};
  Address address_;
};

// Last 20 bytes of Keccak-256 over the uncompressed public key.
Address DeriveAddress(const KeyPair::PublicKey& public_key);

// ECDSA signature (r, s, recovery id). Parsing does not validate ranges;
// IsWellFormed() and IsLowS() do, and verification boundaries call them.
struct Signature {
  static constexpr size_t kSize = 65;

  Scalar r{};
  Scalar s{};
  uint8_t recovery_id = 0;

  // r(32) || s(32) || recovery_id(1)
  std::array<uint8_t, kSize> Serialize() const;
  static Signature FromBytes(ByteSpan bytes);
  std::string ToHex() const;
  static Signature FromHex(std::string_view hex);

  // 1 <= r, s < n and recovery_id in {0, 1}.
  bool IsWellFormed() const;
  // s <= (n - 1) / 2.
  bool IsLowS() const;
  // The malleability twin (r, n - s, recovery_id ^ 1).
  Signature Mirrored() const;

  auto operator<=>(const Signature&) const = default;
};

struct Commitment {
  FieldElement value;
  auto operator<=>(const Commitment&) const = default;
};

struct Nullifier {
  FieldElement value;
  auto operator<=>(const Nullifier&) const = default;
};

// SHA-256 of the message bytes; this is the z fed to ECDSA.
Digest MessageDigest(const Message& message);

// First RFC 6979 (HMAC-SHA256) nonce candidate in [1, n).
Scalar Rfc6979Nonce(const Scalar& secret, const Digest& digest);

// Deterministic RFC 6979 signature, normalized to low-s.
Signature SignDeterministic(const KeyPair& key, const Message& message);

// Signature with a caller-chosen nonce, normalized to low-s. Models wallets
// that do not follow RFC 6979. Throws RangeError for an unusable nonce.
Signature SignWithNonce(const KeyPair& key, const Message& message, const Scalar& nonce);

// Recovers the signer's public key. Throws RecoveryError for malformed or
// unrecoverable signatures and MalleabilityError for high-s input.
KeyPair::PublicKey RecoverPublicKey(const Signature& sig, const Digest& digest);
Address Ecrecover(const Signature& sig, const Message& message);

// H = hashToField(r || s || recovery_id).
Commitment CommitmentHash(const Signature& sig);

// hashToField(s as 32 big-endian bytes).
Nullifier DeriveNullifier(const Signature& sig);

}  // namespace zkss

#endif  // ZKSS_SIGNING_H_
