#pragma once

#include <stdexcept>
#include <string>

namespace crnlyap {

/// Malformed network, mismatched dimensions, or a violated precondition.
class NetworkError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function was evaluated outside the region where it is defined.
class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace crnlyap
