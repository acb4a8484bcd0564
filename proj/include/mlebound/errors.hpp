#pragma once

#include <stdexcept>
#include <string>

namespace mlebound {

// Argument outside the mathematical domain of an operation (x <= 0 for
// log-gamma, p outside (0,1) for a quantile, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A caller-supplied configuration violates a documented precondition
// (unknown model, n below the minimal sample size, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative method failed to reach its tolerance, or a computation
// produced a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mlebound
