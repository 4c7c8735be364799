#ifndef ZKSS_ERRORS_H_
#define ZKSS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace zkss {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text or binary input (bad hex, wrong length, unknown tag).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Integer outside its declared range (e.g. a nonce >= 2^256).
class RangeError : public Error {
 public:
  using Error::Error;
};

// Insert under an index that is already occupied.
class DuplicateKeyError : public Error {
 public:
  using Error::Error;
};

// Lookup of an absent key.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Public key recovery failed (r not on the curve, point at infinity, ...).
class RecoveryError : public Error {
 public:
  using Error::Error;
};

// Signature is not in low-s normal form.
class MalleabilityError : public Error {
 public:
  using Error::Error;
};

// Structurally invalid relation inputs, distinct from an unsatisfied relation.
class MalformedInputError : public Error {
 public:
  using Error::Error;
};

// The honest prover refuses to prove an unsatisfied relation.
class ProverRefusedError : public Error {
 public:
  using Error::Error;
};

// Plaintext does not fit a single RSA-OAEP block.
class SizeError : public Error {
 public:
  using Error::Error;
};

// OAEP decoding failed: wrong key or corrupted ciphertext.
class PaddingError : public Error {
 public:
  using Error::Error;
};

}  // namespace zkss

#endif  // ZKSS_ERRORS_H_
