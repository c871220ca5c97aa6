#pragma once

#include <stdexcept>
#include <string>

namespace wellescape {

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Elliptic modulus too close to 1: the orbit is on (or numerically at) the
// separatrix and the complete integrals blow up.
class NearSeparatrixError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Energy level outside (0, E_max) of the well.
class EnergyRangeError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Electrostatic well with no stable equilibrium.
class StaticPullInError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Iterative method failed or a linear system is singular.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed run configuration (CLI flags or JSON).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wellescape
