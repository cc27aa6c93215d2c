#pragma once

#include <stdexcept>
#include <string>

namespace mutdist {

/// Input that violates a documented invariant (bad parameters, bad flags).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that could not deliver a result at the requested accuracy.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exponential or rate left the representable double range.
class OverflowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

namespace detail {

[[noreturn]] inline void fail_validation(const std::string& field, const std::string& what) {
  throw ValidationError(field + ": " + what);
}

inline void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) fail_validation(field, what);
}

}  // namespace detail
}  // namespace mutdist
