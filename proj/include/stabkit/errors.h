#pragma once

#include <stdexcept>
#include <string>

namespace stabkit {

/// A numerical routine failed to deliver its contract (non-convergence,
/// singular factorization where none is possible, guard exceeded).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario or matrix document.
class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace stabkit
