#pragma once

#include <stdexcept>
#include <string>

namespace heston {

/// Invalid input to a sampler, model, or kernel (negative rate, rho outside [-1,1], ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument lies outside the range where a quantity can be evaluated in double precision.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Inconsistent experiment or command-line configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed to converge or produced an inconsistent value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace heston
