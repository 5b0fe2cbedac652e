#pragma once

#include <stdexcept>
#include <string>

namespace hypbdry {

/// Argument outside the domain of an operation (t <= R, q == p, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A truncated boundary word was asked for letters it does not carry.
struct InsufficientDepth : DomainError {
  using DomainError::DomainError;
};

/// Gromov product of a boundary point with itself.
struct InfiniteProduct : DomainError {
  using DomainError::DomainError;
};

/// An elliptic plane element has no translation length.
struct EllipticElement : DomainError {
  using DomainError::DomainError;
};

/// A refinement would exceed the configured cylinder-depth budget.
struct ResolutionBudgetExceeded : std::runtime_error {
  ResolutionBudgetExceeded(const std::string& what, int max_feasible)
      : std::runtime_error(what), max_feasible_depth(max_feasible) {}
  int max_feasible_depth;
};

/// The plane orbit cache does not reach far enough for the request.
struct CacheExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An in-experiment assertion (sandwich inequality, audit) failed.
struct AssertionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hypbdry
