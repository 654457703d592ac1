#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace neurotrig {

/// Input that cannot be interpreted at all (wrong shape, negative weights,
/// non-finite entries, unparseable scenario keys).
class MalformedInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Well-formed input that violates a modelling assumption.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite closed-loop state during a run.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t step, double time, std::string signal)
      : std::runtime_error("divergence at step " + std::to_string(step) +
                           " (t = " + std::to_string(time) + " s): signal " +
                           signal + " is not finite"),
        step_(step),
        time_(time),
        signal_(std::move(signal)) {}

  std::size_t step() const { return step_; }
  double time() const { return time_; }
  const std::string& signal() const { return signal_; }

 private:
  std::size_t step_;
  double time_;
  std::string signal_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace neurotrig
