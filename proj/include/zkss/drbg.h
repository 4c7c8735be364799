#ifndef ZKSS_DRBG_H_
#define ZKSS_DRBG_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "zkss/hash.h"

namespace zkss {

// Deterministic byte stream: SHA-256(key || counter) blocks. Every seeded
// choice in the simulator draws from one of these so that a seed reproduces
// a game bit for bit on any platform (std distributions are not portable).
class Drbg {
 public:
  Drbg(std::string_view label, uint64_t seed);
  explicit Drbg(const Digest& key) : key_(key) {}

  // Independent child stream; does not advance this one.
  Drbg Fork(std::string_view label) const;
  Drbg Fork(std::string_view label, uint64_t index) const;

  void Fill(std::span<uint8_t> out);
  Bytes NextBytes(size_t n);
  uint64_t NextU64();
  // Uniform in [0, bound); bound > 0.
  uint64_t Uniform(uint64_t bound);

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(Uniform(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  Digest key_;
  uint64_t counter_ = 0;
  Digest block_{};
  size_t used_ = block_.size();
};

}  // namespace zkss

#endif  // ZKSS_DRBG_H_
