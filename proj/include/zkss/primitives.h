#ifndef ZKSS_PRIMITIVES_H_
#define ZKSS_PRIMITIVES_H_

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "zkss/bytes.h"

namespace zkss {

// Element of F_p where p is the secp256k1 group order. Stored as 32 bytes,
// big-endian; every instance satisfies value < p.
class FieldElement {
 public:
  static constexpr size_t kSize = 32;
  using Repr = std::array<uint8_t, kSize>;

  FieldElement() = default;

  static FieldElement FromUint64(uint64_t v);
  // Interprets up to 32 big-endian bytes as an integer and reduces it mod p.
  static FieldElement Reduce(ByteSpan big_endian);
  // Exactly 32 bytes holding a value < p; throws ParseError / RangeError.
  static FieldElement FromCanonical(ByteSpan bytes);
  // Fixed-width "0x" + 64 hex digits.
  static FieldElement FromHex(std::string_view hex);

  // The modulus p itself (which is not a field element).
  static const Repr& Modulus();

  const Repr& bytes() const { return bytes_; }
  std::string ToHex() const;
  bool IsZero() const;

  FieldElement operator+(const FieldElement& other) const;
  FieldElement operator*(const FieldElement& other) const;
  FieldElement Square() const { return *this * *this; }

  auto operator<=>(const FieldElement&) const = default;

 private:
  explicit FieldElement(const Repr& bytes) : bytes_(bytes) {}

  Repr bytes_{};
};

// SHA-256 digest read as a big-endian integer, reduced mod p.
FieldElement HashToField(ByteSpan message);

// 20-byte account identifier.
class Address {
 public:
  static constexpr size_t kSize = 20;
  using Repr = std::array<uint8_t, kSize>;

  Address() = default;
  explicit Address(const Repr& bytes) : bytes_(bytes) {}

  static Address FromBytes(ByteSpan bytes);
  static Address FromHex(std::string_view hex);

  const Repr& bytes() const { return bytes_; }
  std::string ToHex() const;

  auto operator<=>(const Address&) const = default;

 private:
  Repr bytes_{};
};

// Game identifier: contract address || 32-byte big-endian nonce.
class EventId {
 public:
  static constexpr size_t kNonceSize = 32;
  static constexpr size_t kEncodedSize = Address::kSize + kNonceSize;
  using Nonce = std::array<uint8_t, kNonceSize>;
  using Encoding = std::array<uint8_t, kEncodedSize>;

  EventId() = default;
  EventId(const Address& contract, const Nonce& nonce) : contract_(contract), nonce_(nonce) {}

  static EventId Create(const Address& contract, uint64_t nonce);
  // `nonce` is decimal or 0x-prefixed hex; values >= 2^256 throw RangeError.
  static EventId Create(const Address& contract, std::string_view nonce);
  static EventId Decode(ByteSpan encoding);
  static EventId FromHex(std::string_view hex);

  const Address& contract() const { return contract_; }
  const Nonce& nonce() const { return nonce_; }

  Encoding Encode() const;
  std::string ToHex() const;

  auto operator<=>(const EventId&) const = default;

 private:
  Address contract_;
  Nonce nonce_{};
};

// The signed message M = address || eventId.
struct Message {
  static constexpr size_t kSize = Address::kSize + EventId::kEncodedSize;
  std::array<uint8_t, kSize> bytes{};

  ByteSpan span() const { return bytes; }
  bool operator==(const Message&) const = default;
};

Message BuildMessage(const Address& address, const EventId& event_id);

}  // namespace zkss

#endif  // ZKSS_PRIMITIVES_H_
