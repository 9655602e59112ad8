#pragma once

#include <stdexcept>
#include <string>

namespace covert {

// Out-of-range oracle state, incentive, queue or action index.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Vector dimensions that do not agree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// NaN or infinity produced where a finite value is required.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace covert
