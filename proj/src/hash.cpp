#include "zkss/hash.h"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <memory>
#include <stdexcept>

namespace zkss {
namespace {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

const EVP_MD* Sha256Md() {
  static const EVP_MD* md = EVP_MD_fetch(nullptr, "SHA256", nullptr);
  return md;
}

EVP_MD_CTX* ThreadContext() {
  thread_local std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
  return ctx.get();
}

}  // namespace

Digest Sha256(ByteSpan data) { return Sha256({data}); }

Digest Sha256(std::initializer_list<ByteSpan> parts) {
  EVP_MD_CTX* ctx = ThreadContext();
  if (EVP_DigestInit_ex(ctx, Sha256Md(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 init failed");
  }
  for (ByteSpan part : parts) {
    EVP_DigestUpdate(ctx, part.data(), part.size());
  }
  Digest out;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, out.data(), &len);
  return out;
}

Digest HmacSha256(ByteSpan key, std::initializer_list<ByteSpan> parts) {
  Bytes message;
  for (ByteSpan part : parts) Append(message, part);
  Digest out;
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), message.data(),
           message.size(), out.data(), &len) == nullptr) {
    throw std::runtime_error("HMAC-SHA256 failed");
  }
  return out;
}

}  // namespace zkss
