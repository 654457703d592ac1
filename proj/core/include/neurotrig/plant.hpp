#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "neurotrig/rbfnn.hpp"

namespace neurotrig {

/// f_k receives exactly the leading k states (x_1, ..., x_k).
using Nonlinearity = std::function<double(std::span<const double>)>;

/// Strict-feedback chain
///   dx_k/dt = x_{k+1} + f_k(x_1..x_k),  k < n
///   dx_n/dt = u + f_n(x_1..x_n),        y = x_1.
class StrictFeedbackPlant {
 public:
  explicit StrictFeedbackPlant(std::vector<Nonlinearity> nonlinearities);

  std::size_t order() const { return f_.size(); }

  /// f_k evaluated on the leading k entries of `state`; k is 1-based.
  double nonlinearity(std::size_t k, std::span<const double> state) const;

  /// Writes n rates into `rates`. Non-finite state or control raises
  /// MalformedInputError.
  void dynamics(std::span<const double> state, double control, std::span<double> rates) const;
  Eigen::VectorXd dynamics(const Eigen::VectorXd& state, double control) const;

 private:
  std::vector<Nonlinearity> f_;
};

/// The four-agent demonstration system (agent_index in 1..4):
///   f_1 = 0.5 sin(0.1 x_1)
///   f_2 = 0.1 sin(x_1 x_2) + 0.2 exp(-|x_1|^i + 1).
std::vector<Nonlinearity> demo_nonlinearities(std::size_t agent_index);

/// f_k = 0 for every level.
std::vector<Nonlinearity> zero_nonlinearities(std::size_t order);

/// f_k(x_1..x_k) = W_k^T phi_k(x_1..x_k): exactly representable by the
/// matching network, so the ideal weights are known.
std::vector<Nonlinearity> in_span_nonlinearities(std::vector<GaussianNetwork> networks,
                                                 std::vector<Eigen::VectorXd> ideal_weights);

}  // namespace neurotrig
