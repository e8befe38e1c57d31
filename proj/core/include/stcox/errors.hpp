#pragma once

#include <stdexcept>
#include <string>

namespace stcox {

// Bad user input: malformed rows, out-of-range coordinates, missing config.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model or kernel parameters outside their valid domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Factorization failures, non-finite likelihoods, overflow guards.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stcox
