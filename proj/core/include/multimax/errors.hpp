#pragma once

#include <stdexcept>
#include <string>

namespace multimax {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: misaligned indices, bad files, bad
/// policies, unknown run ids.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A well-formed request that cannot be computed (undefined metric) or a
/// violated theorem-level postcondition.
class ComputationError : public Error {
 public:
  using Error::Error;
};

}  // namespace multimax
