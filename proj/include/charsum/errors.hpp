#pragma once

#include <stdexcept>
#include <string>

namespace charsum {

/// Base of every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated.
struct DomainError : Error {
  using Error::Error;
};

/// A multiplicative function was evaluated past its declared prime support.
struct SupportError : DomainError {
  using DomainError::DomainError;
};

/// A configured size limit (sieve bound, sum length, modulus) was exceeded.
struct CapExceeded : Error {
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw DomainError(message);
}

inline void require_cap(bool condition, const std::string& message) {
  if (!condition) throw CapExceeded(message);
}

}  // namespace detail
}  // namespace charsum
