#pragma once

#include <stdexcept>
#include <string>

namespace lpsens {

// Malformed input: bad shapes, non-finite entries, out-of-range parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RankDeficientError : public InputError {
 public:
  using InputError::InputError;
};

// An iterative solver stopped before reaching its tolerance.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Internal invariant broken; indicates a bug rather than bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace lpsens
