#pragma once

#include <stdexcept>
#include <string>

namespace wickgl {

/// Raised when an operation's domain preconditions are violated
/// (bad dimension, undersampled grid, non-PSD covariance, ...).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an iterative method fails to produce a certificate.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace wickgl
