#pragma once

#include <stdexcept>
#include <string>

namespace mots {

/// Input outside the mathematical domain of an operation (invalid profile,
/// rotation parameter beyond the extremal value, unstable problem, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure did not deliver a trustworthy answer: non-convergence,
/// a sign-changing principal eigenvector, a singular Jacobian.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration document or command line.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mots
