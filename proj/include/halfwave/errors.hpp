#pragma once

#include <stdexcept>
#include <string>

namespace halfwave {

// Invalid grid sizes, exponents or plan parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Calling an operation on the wrong kind of input.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Non-finite symbol values, overflow, under-resolved quadrature.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical precondition (spectral leakage, wraparound, tail bound) was violated.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace halfwave
