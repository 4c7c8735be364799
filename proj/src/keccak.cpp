#include <array>
#include <bit>
#include <cstring>

#include "zkss/hash.h"

namespace zkss {
namespace {

constexpr std::array<uint64_t, 24> kRoundConstants = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL};

// Rotation offsets and lane permutation for the combined rho/pi step.
constexpr std::array<int, 24> kRho = {1,  3,  6,  10, 15, 21, 28, 36, 45, 55, 2,  14,
                                      27, 41, 56, 8,  25, 43, 62, 18, 39, 61, 20, 44};
constexpr std::array<int, 24> kPi = {10, 7,  11, 17, 18, 3, 5,  16, 8,  21, 24, 4,
                                     15, 23, 19, 13, 12, 2, 20, 14, 22, 9,  6,  1};

void KeccakF1600(std::array<uint64_t, 25>& a) {
  for (uint64_t rc : kRoundConstants) {
    // theta
    std::array<uint64_t, 5> c;
    for (int x = 0; x < 5; ++x) c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
    for (int x = 0; x < 5; ++x) {
      uint64_t d = c[(x + 4) % 5] ^ std::rotl(c[(x + 1) % 5], 1);
      for (int y = 0; y < 25; y += 5) a[y + x] ^= d;
    }
    // rho + pi
    uint64_t current = a[1];
    for (int i = 0; i < 24; ++i) {
      int j = kPi[i];
      uint64_t next = a[j];
      a[j] = std::rotl(current, kRho[i]);
      current = next;
    }
    // chi
    for (int y = 0; y < 25; y += 5) {
      std::array<uint64_t, 5> row;
      for (int x = 0; x < 5; ++x) row[x] = a[y + x];
      for (int x = 0; x < 5; ++x) a[y + x] = row[x] ^ (~row[(x + 1) % 5] & row[(x + 2) % 5]);
    }
    // iota
    a[0] ^= rc;
  }
}

uint64_t LoadLe64(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

Digest Keccak256(ByteSpan data) {
  constexpr size_t kRate = 136;
  std::array<uint64_t, 25> state{};

  auto absorb = [&state](const uint8_t* block) {
    for (size_t i = 0; i < kRate / 8; ++i) state[i] ^= LoadLe64(block + 8 * i);
    KeccakF1600(state);
  };

  size_t offset = 0;
  for (; offset + kRate <= data.size(); offset += kRate) absorb(data.data() + offset);

  std::array<uint8_t, kRate> last{};
  size_t tail = data.size() - offset;
  if (tail > 0) std::memcpy(last.data(), data.data() + offset, tail);
  last[tail] ^= 0x01;
  last[kRate - 1] ^= 0x80;
  absorb(last.data());

  Digest out;
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<uint8_t>(state[i / 8] >> (8 * (i % 8)));
  }
  return out;
}

}  // namespace zkss
