#ifndef ZKSS_TESTS_TEST_SUPPORT_H_
#define ZKSS_TESTS_TEST_SUPPORT_H_

#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "zkss/bytes.h"

namespace zkss::testing {

// Vectors produced before the build by tests/oracles/gen_golden_vectors.py.
inline const nlohmann::json& GoldenVectors() {
  static const nlohmann::json vectors = [] {
    std::ifstream in(std::string(ZKSS_TEST_DATA_DIR) + "/golden_vectors.json");
    if (!in) throw std::runtime_error("golden_vectors.json not found");
    return nlohmann::json::parse(in);
  }();
  return vectors;
}

// Seeded generator for property loops; failures print the seed.
class Gen {
 public:
  explicit Gen(uint64_t seed) : engine_(seed) {}

  uint64_t U64() { return engine_(); }
  uint64_t Below(uint64_t bound) { return std::uniform_int_distribution<uint64_t>(0, bound - 1)(engine_); }
  Bytes RandomBytes(size_t n) {
    Bytes out(n);
    for (auto& b : out) b = static_cast<uint8_t>(engine_());
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace zkss::testing

#endif  // ZKSS_TESTS_TEST_SUPPORT_H_
