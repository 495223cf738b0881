#pragma once

#include <stdexcept>
#include <string>

namespace siltlab {

/// Argument outside the mathematical domain of an operation (t <= 0, d <= alpha, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Evaluation at a point where the requested kernel is infinite.
class SingularEvaluation : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Missing or inconsistent setup: unbuilt tables, bad config fields, unsamplable densities.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to reach its contract (non-convergence, broken invariants).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The particle population exceeded the configured cap.
class PopulationExplosion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace siltlab
