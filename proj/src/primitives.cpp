#include "zkss/primitives.h"

#include <openssl/bn.h>

#include <algorithm>
#include <memory>
#include <stdexcept>

#include "zkss/errors.h"
#include "zkss/hash.h"

namespace zkss {
namespace {

constexpr FieldElement::Repr kModulus = {
    0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff,
    0xff, 0xff, 0xff, 0xff, 0xfe, 0xba, 0xae, 0xdc, 0xe6, 0xaf, 0x48,
    0xa0, 0x3b, 0xbf, 0xd2, 0x5e, 0x8c, 0xd0, 0x36, 0x41, 0x41};

struct BnDeleter {
  void operator()(BIGNUM* bn) const { BN_free(bn); }
};
struct BnCtxDeleter {
  void operator()(BN_CTX* ctx) const { BN_CTX_free(ctx); }
};
using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;

bool GreaterOrEqual(const FieldElement::Repr& a, const FieldElement::Repr& b) {
  return !std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// a -= b (mod 2^256).
void SubtractInPlace(FieldElement::Repr& a, const FieldElement::Repr& b) {
  int borrow = 0;
  for (int i = FieldElement::kSize - 1; i >= 0; --i) {
    int diff = int{a[i]} - int{b[i]} - borrow;
    borrow = diff < 0 ? 1 : 0;
    a[i] = static_cast<uint8_t>(diff + (borrow << 8));
  }
}

}  // namespace

FieldElement FieldElement::FromUint64(uint64_t v) {
  Repr bytes{};
  for (int i = 0; i < 8; ++i) bytes[kSize - 1 - i] = static_cast<uint8_t>(v >> (8 * i));
  return FieldElement(bytes);
}

FieldElement FieldElement::Reduce(ByteSpan big_endian) {
  if (big_endian.size() > kSize) throw RangeError("field reduction input exceeds 32 bytes");
  Repr bytes{};
  std::copy(big_endian.begin(), big_endian.end(), bytes.end() - big_endian.size());
  // 2p > 2^256, so one conditional subtraction suffices.
  if (GreaterOrEqual(bytes, kModulus)) SubtractInPlace(bytes, kModulus);
  return FieldElement(bytes);
}

FieldElement FieldElement::FromCanonical(ByteSpan bytes) {
  if (bytes.size() != kSize) throw ParseError("field element must be 32 bytes");
  Repr repr;
  std::copy(bytes.begin(), bytes.end(), repr.begin());
  if (GreaterOrEqual(repr, kModulus)) throw RangeError("field element is not reduced");
  return FieldElement(repr);
}

FieldElement FieldElement::FromHex(std::string_view hex) {
  return FromCanonical(FromHexFixed(hex, kSize));
}

const FieldElement::Repr& FieldElement::Modulus() { return kModulus; }

std::string FieldElement::ToHex() const { return zkss::ToHex(bytes_); }

bool FieldElement::IsZero() const {
  return std::all_of(bytes_.begin(), bytes_.end(), [](uint8_t b) { return b == 0; });
}

FieldElement FieldElement::operator+(const FieldElement& other) const {
  Repr sum{};
  int carry = 0;
  for (int i = kSize - 1; i >= 0; --i) {
    int s = int{bytes_[i]} + int{other.bytes_[i]} + carry;
    sum[i] = static_cast<uint8_t>(s & 0xff);
    carry = s >> 8;
  }
  if (carry != 0 || GreaterOrEqual(sum, kModulus)) SubtractInPlace(sum, kModulus);
  return FieldElement(sum);
}

FieldElement FieldElement::operator*(const FieldElement& other) const {
  thread_local std::unique_ptr<BN_CTX, BnCtxDeleter> ctx(BN_CTX_new());
  BnPtr a(BN_bin2bn(bytes_.data(), kSize, nullptr));
  BnPtr b(BN_bin2bn(other.bytes_.data(), kSize, nullptr));
  BnPtr p(BN_bin2bn(kModulus.data(), kSize, nullptr));
  BnPtr r(BN_new());
  if (!a || !b || !p || !r || BN_mod_mul(r.get(), a.get(), b.get(), p.get(), ctx.get()) != 1) {
    throw std::runtime_error("field multiplication failed");
  }
  Repr out{};
  BN_bn2binpad(r.get(), out.data(), kSize);
  return FieldElement(out);
}

FieldElement HashToField(ByteSpan message) {
  Digest digest = Sha256(message);
  return FieldElement::Reduce(digest);
}

Address Address::FromBytes(ByteSpan bytes) {
  if (bytes.size() != kSize) throw ParseError("address must be 20 bytes");
  Repr repr;
  std::copy(bytes.begin(), bytes.end(), repr.begin());
  return Address(repr);
}

Address Address::FromHex(std::string_view hex) { return FromBytes(FromHexFixed(hex, kSize)); }

std::string Address::ToHex() const { return zkss::ToHex(bytes_); }

EventId EventId::Create(const Address& contract, uint64_t nonce) {
  Nonce bytes{};
  for (int i = 0; i < 8; ++i) bytes[kNonceSize - 1 - i] = static_cast<uint8_t>(nonce >> (8 * i));
  return EventId(contract, bytes);
}

EventId EventId::Create(const Address& contract, std::string_view nonce) {
  std::string text(nonce);
  BIGNUM* raw = nullptr;
  bool hex = text.starts_with("0x") || text.starts_with("0X");
  int parsed = hex ? BN_hex2bn(&raw, text.c_str() + 2) : BN_dec2bn(&raw, text.c_str());
  BnPtr value(raw);
  size_t expected = hex ? text.size() - 2 : text.size();
  if (parsed <= 0 || static_cast<size_t>(parsed) != expected) {
    throw ParseError("invalid nonce: " + text);
  }
  if (BN_is_negative(value.get())) throw RangeError("nonce must be non-negative");
  if (BN_num_bits(value.get()) > 8 * static_cast<int>(kNonceSize)) {
    throw RangeError("nonce must be < 2^256");
  }
  Nonce bytes{};
  BN_bn2binpad(value.get(), bytes.data(), kNonceSize);
  return EventId(contract, bytes);
}

EventId EventId::Decode(ByteSpan encoding) {
  if (encoding.size() != kEncodedSize) throw ParseError("eventId encoding must be 52 bytes");
  Nonce nonce;
  std::copy(encoding.begin() + Address::kSize, encoding.end(), nonce.begin());
  return EventId(Address::FromBytes(encoding.first(Address::kSize)), nonce);
}

EventId EventId::FromHex(std::string_view hex) { return Decode(FromHexFixed(hex, kEncodedSize)); }

EventId::Encoding EventId::Encode() const {
  Encoding out;
  std::copy(contract_.bytes().begin(), contract_.bytes().end(), out.begin());
  std::copy(nonce_.begin(), nonce_.end(), out.begin() + Address::kSize);
  return out;
}

std::string EventId::ToHex() const { return zkss::ToHex(Encode()); }

Message BuildMessage(const Address& address, const EventId& event_id) {
  Message m;
  std::copy(address.bytes().begin(), address.bytes().end(), m.bytes.begin());
  EventId::Encoding encoded = event_id.Encode();
  std::copy(encoded.begin(), encoded.end(), m.bytes.begin() + Address::kSize);
  return m;
}

}  // namespace zkss
