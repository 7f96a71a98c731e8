#pragma once

#include <stdexcept>
#include <string>

namespace sal {

/// Input violates a documented precondition (shape, symmetry, norm, range).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A structural hypothesis of an analysis does not hold for the given input
/// (e.g. spectral dominance, negative definiteness).
class PreconditionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Floating point failure: overflow, non-finite state, non-convergence.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sal
