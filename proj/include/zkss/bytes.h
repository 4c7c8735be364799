#ifndef ZKSS_BYTES_H_
#define ZKSS_BYTES_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zkss {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;

// Lowercase hex with a "0x" prefix.
std::string ToHex(ByteSpan data);

// Accepts an optional "0x" prefix and either case. Throws ParseError.
Bytes FromHex(std::string_view hex);

// Like FromHex but also requires exactly `size` bytes.
Bytes FromHexFixed(std::string_view hex, size_t size);

std::string ToBase64(ByteSpan data);
Bytes FromBase64(std::string_view text);

inline ByteSpan AsBytes(std::string_view s) {
  return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

inline void Append(Bytes& out, ByteSpan data) {
  out.insert(out.end(), data.begin(), data.end());
}

}  // namespace zkss

#endif  // ZKSS_BYTES_H_
