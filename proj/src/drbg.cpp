#include "zkss/drbg.h"

#include <array>
#include <stdexcept>

namespace zkss {
namespace {

std::array<uint8_t, 8> BigEndian64(uint64_t v) {
  std::array<uint8_t, 8> out;
  for (int i = 0; i < 8; ++i) out[7 - i] = static_cast<uint8_t>(v >> (8 * i));
  return out;
}

}  // namespace

Drbg::Drbg(std::string_view label, uint64_t seed)
    : key_(Sha256({AsBytes("zkss/drbg/"), AsBytes(label), BigEndian64(seed)})) {}

Drbg Drbg::Fork(std::string_view label) const {
  return Drbg(Sha256({key_, AsBytes("/fork/"), AsBytes(label)}));
}

Drbg Drbg::Fork(std::string_view label, uint64_t index) const {
  return Drbg(Sha256({key_, AsBytes("/fork/"), AsBytes(label), BigEndian64(index)}));
}

void Drbg::Fill(std::span<uint8_t> out) {
  for (uint8_t& b : out) {
    if (used_ == block_.size()) {
      block_ = Sha256({key_, BigEndian64(counter_++)});
      used_ = 0;
    }
    b = block_[used_++];
  }
}

Bytes Drbg::NextBytes(size_t n) {
  Bytes out(n);
  Fill(out);
  return out;
}

uint64_t Drbg::NextU64() {
  std::array<uint8_t, 8> raw;
  Fill(raw);
  uint64_t v = 0;
  for (uint8_t b : raw) v = (v << 8) | b;
  return v;
}

uint64_t Drbg::Uniform(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Uniform bound must be positive");
  // Rejection sampling over the largest multiple of bound.
  const uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  for (;;) {
    uint64_t v = NextU64();
    if (v < limit) return v % bound;
  }
}

}  // namespace zkss
