#ifndef ZKSS_HASH_H_
#define ZKSS_HASH_H_

#include <array>
#include <initializer_list>

#include "zkss/bytes.h"

namespace zkss {

using Digest = std::array<uint8_t, 32>;

Digest Sha256(ByteSpan data);

// SHA-256 over the concatenation of `parts`.
Digest Sha256(std::initializer_list<ByteSpan> parts);

Digest HmacSha256(ByteSpan key, std::initializer_list<ByteSpan> parts);

// Original Keccak-256 (pad byte 0x01), as used for account addresses. This is
// not FIPS-202 SHA3-256.
Digest Keccak256(ByteSpan data);

}  // namespace zkss

#endif  // ZKSS_HASH_H_
