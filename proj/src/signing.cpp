#include "zkss/signing.h"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>

#include <algorithm>
#include <memory>
#include <stdexcept>

#include "zkss/errors.h"

namespace zkss {
namespace {

struct BnDeleter {
  void operator()(BIGNUM* bn) const { BN_clear_free(bn); }
};
struct BnCtxDeleter {
  void operator()(BN_CTX* ctx) const { BN_CTX_free(ctx); }
};
struct PointDeleter {
  void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;
using PointPtr = std::unique_ptr<EC_POINT, PointDeleter>;

void Check(int ok, const char* what) {
  if (ok != 1) throw std::runtime_error(std::string("secp256k1: ") + what);
}

struct Curve {
  EC_GROUP* group;
  BnPtr order;
  BnPtr half_order;

  Curve() : group(EC_GROUP_new_by_curve_name(NID_secp256k1)), order(BN_new()), half_order(BN_new()) {
    if (group == nullptr) throw std::runtime_error("secp256k1 unavailable");
    Check(EC_GROUP_get_order(group, order.get(), nullptr), "order");
    Check(BN_rshift1(half_order.get(), order.get()), "half order");
  }
};

const Curve& Secp256k1() {
  static const Curve curve;
  return curve;
}

BN_CTX* Ctx() {
  thread_local std::unique_ptr<BN_CTX, BnCtxDeleter> ctx(BN_CTX_new());
  return ctx.get();
}

BnPtr ToBn(ByteSpan bytes) {
  BnPtr bn(BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr));
  if (!bn) throw std::runtime_error("BN_bin2bn failed");
  return bn;
}

BnPtr NewBn() {
  BnPtr bn(BN_new());
  if (!bn) throw std::runtime_error("BN_new failed");
  return bn;
}

Scalar ToScalar(const BIGNUM* bn) {
  Scalar out{};
  Check(BN_bn2binpad(bn, out.data(), static_cast<int>(out.size())) == 32 ? 1 : 0, "bn2bin");
  return out;
}

bool InScalarRange(const Scalar& v) {
  BnPtr bn = ToBn(v);
  return !BN_is_zero(bn.get()) && BN_cmp(bn.get(), Secp256k1().order.get()) < 0;
}

KeyPair::PublicKey AffineBytes(const EC_POINT* point) {
  const Curve& curve = Secp256k1();
  BnPtr x = NewBn();
  BnPtr y = NewBn();
  Check(EC_POINT_get_affine_coordinates(curve.group, point, x.get(), y.get(), Ctx()), "affine");
  KeyPair::PublicKey out{};
  BN_bn2binpad(x.get(), out.data(), 32);
  BN_bn2binpad(y.get(), out.data() + 32, 32);
  return out;
}

// One ECDSA attempt with nonce k. Returns false when k yields r == 0,
// s == 0, or R.x >= n (the last would need recovery ids 2/3).
bool TrySign(const Scalar& secret, const Digest& digest, const Scalar& nonce, Signature& out) {
  const Curve& curve = Secp256k1();
  BN_CTX* ctx = Ctx();
  BnPtr k = ToBn(nonce);
  if (BN_is_zero(k.get()) || BN_cmp(k.get(), curve.order.get()) >= 0) return false;

  PointPtr big_r(EC_POINT_new(curve.group));
  Check(EC_POINT_mul(curve.group, big_r.get(), k.get(), nullptr, nullptr, ctx), "k*G");
  BnPtr x = NewBn();
  BnPtr y = NewBn();
  Check(EC_POINT_get_affine_coordinates(curve.group, big_r.get(), x.get(), y.get(), ctx), "R");
  if (BN_cmp(x.get(), curve.order.get()) >= 0) return false;
  BnPtr r = NewBn();
  Check(BN_copy(r.get(), x.get()) != nullptr ? 1 : 0, "copy");
  if (BN_is_zero(r.get())) return false;

  BnPtr d = ToBn(secret);
  BnPtr z = ToBn(digest);
  BnPtr k_inv = NewBn();
  if (BN_mod_inverse(k_inv.get(), k.get(), curve.order.get(), ctx) == nullptr) return false;
  BnPtr rd = NewBn();
  Check(BN_mod_mul(rd.get(), r.get(), d.get(), curve.order.get(), ctx), "r*d");
  BnPtr sum = NewBn();
  Check(BN_mod_add(sum.get(), z.get(), rd.get(), curve.order.get(), ctx), "z+rd");
  BnPtr s = NewBn();
  Check(BN_mod_mul(s.get(), k_inv.get(), sum.get(), curve.order.get(), ctx), "s");
  if (BN_is_zero(s.get())) return false;

  uint8_t recovery_id = BN_is_odd(y.get()) ? 1 : 0;
  if (BN_cmp(s.get(), curve.half_order.get()) > 0) {
    Check(BN_sub(s.get(), curve.order.get(), s.get()), "n-s");
    recovery_id ^= 1;
  }
  out.r = ToScalar(r.get());
  out.s = ToScalar(s.get());
  out.recovery_id = recovery_id;
  return true;
}

// RFC 6979 section 3.2 with HMAC-SHA256 and qlen == hlen == 256.
class NonceGenerator {
 public:
  NonceGenerator(const Scalar& secret, const Digest& digest) {
    // bits2octets(h1) = int(h1) mod n, 32 bytes.
    BnPtr h = ToBn(digest);
    if (BN_cmp(h.get(), Secp256k1().order.get()) >= 0) {
      Check(BN_sub(h.get(), h.get(), Secp256k1().order.get()), "h1 mod n");
    }
    Scalar h1 = ToScalar(h.get());
    static constexpr std::array<uint8_t, 1> kZero = {0x00};
    static constexpr std::array<uint8_t, 1> kOne = {0x01};
    v_.fill(0x01);
    k_.fill(0x00);
    k_ = HmacSha256(k_, {v_, kZero, secret, h1});
    v_ = HmacSha256(k_, {v_});
    k_ = HmacSha256(k_, {v_, kOne, secret, h1});
    v_ = HmacSha256(k_, {v_});
  }

  Scalar Next() {
    static constexpr std::array<uint8_t, 1> kZero = {0x00};
    for (;;) {
      if (started_) {
        k_ = HmacSha256(k_, {v_, kZero});
        v_ = HmacSha256(k_, {v_});
      }
      started_ = true;
      v_ = HmacSha256(k_, {v_});
      Scalar candidate;
      std::copy(v_.begin(), v_.end(), candidate.begin());
      if (InScalarRange(candidate)) return candidate;
    }
  }

 private:
  Digest v_;
  Digest k_;
  bool started_ = false;
};

}  // namespace

KeyPair KeyPair::FromSecret(ByteSpan secret) {
  if (secret.size() != 32) throw ParseError("secret key must be 32 bytes");
  KeyPair kp;
  std::copy(secret.begin(), secret.end(), kp.secret_.begin());
  if (!InScalarRange(kp.secret_)) throw RangeError("secret key must satisfy 1 <= d < n");
  const Curve& curve = Secp256k1();
  BnPtr d = ToBn(kp.secret_);
  PointPtr q(EC_POINT_new(curve.group));
  Check(EC_POINT_mul(curve.group, q.get(), d.get(), nullptr, nullptr, Ctx()), "d*G");
  kp.public_key_ = AffineBytes(q.get());
  kp.address_ = DeriveAddress(kp.public_key_);
  return kp;
}

KeyPair KeyPair::Generate(Drbg& rng) {
  for (;;) {
    Scalar candidate;
    rng.Fill(candidate);
    if (InScalarRange(candidate)) return FromSecret(candidate);
  }
}

Address DeriveAddress(const KeyPair::PublicKey& public_key) {
  Digest digest = Keccak256(public_key);
  return Address::FromBytes(ByteSpan(digest).subspan(32 - Address::kSize));
}

std::array<uint8_t, Signature::kSize> Signature::Serialize() const {
  std::array<uint8_t, kSize> out;
  std::copy(r.begin(), r.end(), out.begin());
  std::copy(s.begin(), s.end(), out.begin() + 32);
  out[64] = recovery_id;
  return out;
}

Signature Signature::FromBytes(ByteSpan bytes) {
  if (bytes.size() != kSize) throw ParseError("signature must be 65 bytes");
  Signature sig;
  std::copy(bytes.begin(), bytes.begin() + 32, sig.r.begin());
  std::copy(bytes.begin() + 32, bytes.begin() + 64, sig.s.begin());
  sig.recovery_id = bytes[64];
  return sig;
}

std::string Signature::ToHex() const { return zkss::ToHex(Serialize()); }

Signature Signature::FromHex(std::string_view hex) { return FromBytes(FromHexFixed(hex, kSize)); }

bool Signature::IsWellFormed() const {
  return recovery_id <= 1 && InScalarRange(r) && InScalarRange(s);
}

bool Signature::IsLowS() const {
  BnPtr value = ToBn(s);
  return BN_cmp(value.get(), Secp256k1().half_order.get()) <= 0;
}

Signature Signature::Mirrored() const {
  BnPtr value = ToBn(s);
  BnPtr twin = NewBn();
  Check(BN_sub(twin.get(), Secp256k1().order.get(), value.get()), "n-s");
  Signature out = *this;
  out.s = ToScalar(twin.get());
  out.recovery_id = recovery_id ^ 1;
  return out;
}

Digest MessageDigest(const Message& message) { return Sha256(message.span()); }

Scalar Rfc6979Nonce(const Scalar& secret, const Digest& digest) {
  return NonceGenerator(secret, digest).Next();
}

Signature SignDeterministic(const KeyPair& key, const Message& message) {
  Digest digest = MessageDigest(message);
  NonceGenerator nonces(key.secret(), digest);
  Signature sig;
  while (!TrySign(key.secret(), digest, nonces.Next(), sig)) {
  }
  return sig;
}

Signature SignWithNonce(const KeyPair& key, const Message& message, const Scalar& nonce) {
  Signature sig;
  if (!TrySign(key.secret(), MessageDigest(message), nonce, sig)) {
    throw RangeError("nonce does not yield a valid signature");
  }
  return sig;
}

KeyPair::PublicKey RecoverPublicKey(const Signature& sig, const Digest& digest) {
  if (!sig.IsWellFormed()) throw RecoveryError("signature components out of range");
  if (!sig.IsLowS()) throw MalleabilityError("signature is not in low-s form");

  const Curve& curve = Secp256k1();
  BN_CTX* ctx = Ctx();
  BnPtr r = ToBn(sig.r);
  BnPtr s = ToBn(sig.s);
  BnPtr z = ToBn(digest);

  PointPtr big_r(EC_POINT_new(curve.group));
  if (EC_POINT_set_compressed_coordinates(curve.group, big_r.get(), r.get(), sig.recovery_id,
                                          ctx) != 1) {
    throw RecoveryError("r is not the x-coordinate of a curve point");
  }

  // Q = r^-1 * (s*R - z*G)
  BnPtr r_inv = NewBn();
  if (BN_mod_inverse(r_inv.get(), r.get(), curve.order.get(), ctx) == nullptr) {
    throw RecoveryError("r is not invertible");
  }
  BnPtr u1 = NewBn();
  BnPtr u2 = NewBn();
  BnPtr neg_z = NewBn();
  Check(BN_mod_sub(neg_z.get(), curve.order.get(), z.get(), curve.order.get(), ctx), "-z");
  Check(BN_mod_mul(u1.get(), neg_z.get(), r_inv.get(), curve.order.get(), ctx), "u1");
  Check(BN_mod_mul(u2.get(), s.get(), r_inv.get(), curve.order.get(), ctx), "u2");

  PointPtr q(EC_POINT_new(curve.group));
  Check(EC_POINT_mul(curve.group, q.get(), u1.get(), big_r.get(), u2.get(), ctx), "Q");
  if (EC_POINT_is_at_infinity(curve.group, q.get()) == 1) {
    throw RecoveryError("recovered point at infinity");
  }
  return AffineBytes(q.get());
}

Address Ecrecover(const Signature& sig, const Message& message) {
  return DeriveAddress(RecoverPublicKey(sig, MessageDigest(message)));
}

Commitment CommitmentHash(const Signature& sig) {
  return Commitment{HashToField(sig.Serialize())};
}

Nullifier DeriveNullifier(const Signature& sig) { return Nullifier{HashToField(sig.s)}; }

}  // namespace zkss
