#pragma once

#include <stdexcept>
#include <string>

namespace rsrl {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed MDPs, configs, or parameters. The CLI maps these to
// exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Transition row (h, s, a) is not a probability distribution. `step` is
// 1-based, states and actions are 0-based.
class NonStochasticKernel : public ValidationError {
 public:
  NonStochasticKernel(int step, int state, int action, const std::string& what)
      : ValidationError(what), step(step), state(state), action(action) {}
  int step;
  int state;
  int action;
};

class RewardOutOfRange : public ValidationError {
 public:
  RewardOutOfRange(int step, int state, int action, const std::string& what)
      : ValidationError(what), step(step), state(state), action(action) {}
  int step;
  int state;
  int action;
};

class InstanceTooLarge : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InfeasibleConstruction : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// |beta| * (H + 1) exceeds the exponent budget, or a non-finite value
// appeared inside an exponentiated estimate.
class NumericOverflow : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rsrl
