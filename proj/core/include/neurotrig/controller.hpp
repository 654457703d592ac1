#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "neurotrig/rbfnn.hpp"

namespace neurotrig {

/// Design parameters of one agent. Per-level vectors are indexed from level
/// 1 (c, sigma_w, gamma_w: n entries) or level 2 (mu_filter: n - 1 entries).
struct ControllerGains {
  double kappa1 = 0.5;
  std::vector<double> c;
  double gamma_y0 = 1.5;
  double sigma_y0 = 0.001;
  std::vector<double> sigma_w;
  std::vector<double> gamma_w;
  std::vector<double> mu_filter;

  /// Throws MalformedInputError unless every field is positive and sized for
  /// a chain of the given order.
  void validate(std::size_t order) const;

  /// Values used in the four-agent demonstration (n = 2).
  static ControllerGains demo();
};

struct NeighborOutput {
  double weight = 0.0;
  double output = 0.0;
};

/// e_i = sum_j a_ij (y_i - y_j) + mu_i (y_i - y_0).
double consensus_error(double own_output, std::span<const NeighborOutput> neighbors,
                       double leader_output, double leader_gain);

/// z_1 = x_1 - y0_hat, z_k = x_k - alpha_kf (k >= 2).
Eigen::VectorXd tracking_errors(std::span<const double> states, double leader_estimate,
                                std::span<const double> filter_outputs);

/// alpha_1 = -kappa1 e - (c_1 + 1) z_1 - W_1^T phi + d/dt y0_hat.
double virtual_control_1(const ControllerGains& gains, double consensus_err, double z1,
                         const Eigen::VectorXd& basis, const Eigen::VectorXd& weights,
                         double leader_estimate_rate);

/// d/dt alpha_f = (alpha_prev - alpha_f) / mu.
double filter_rate(double alpha_prev, double alpha_f, double mu);

/// alpha_k = -(c_k + 1) z_k - z_{k-1} - W_k^T phi + (alpha_{k-1} - alpha_kf) / mu_k,
/// 2 <= level <= n.
double virtual_control_k(const ControllerGains& gains, std::size_t level, double z_k,
                         double z_prev, const Eigen::VectorXd& basis,
                         const Eigen::VectorXd& weights, double alpha_prev, double alpha_f);

/// u = alpha_n.
double control_input(std::span<const double> virtual_controls);

/// d/dt y0_hat = -gamma e - gamma sigma y0_hat.
double leader_estimator_rate(const ControllerGains& gains, double consensus_err,
                             double leader_estimate);

/// Adaptive and filter state owned by one agent.
struct AgentControllerState {
  std::vector<WeightEstimate> weight_estimates;  // one per level
  double leader_estimate = 0.0;
  std::vector<double> filter_states;             // alpha_kf, k = 2..n
};

/// Everything one control update produces.
struct ControlEvaluation {
  double consensus_error = 0.0;
  double leader_estimate_rate = 0.0;
  Eigen::VectorXd z;                   // tracking errors, levels 1..n
  Eigen::VectorXd alpha;               // virtual controls, levels 1..n
  std::vector<Eigen::VectorXd> basis;  // phi_k at the NN input of level k
  double control = 0.0;
};

/// One agent's control law. The same evaluation serves both schemes: fed
/// with held broadcast values it is the event-triggered law, fed with raw
/// values it is the continuous one.
class AgentController {
 public:
  /// networks[k-1] serves level k and must take k inputs, or k + 1 when
  /// the leader estimate is appended to the NN input.
  AgentController(ControllerGains gains, std::vector<GaussianNetwork> networks,
                  bool leader_estimate_in_nn_input);

  std::size_t order() const { return networks_.size(); }
  const ControllerGains& gains() const { return gains_; }
  const std::vector<GaussianNetwork>& networks() const { return networks_; }
  bool leader_estimate_in_nn_input() const { return leader_estimate_in_input_; }

  /// Zero weights, zero leader estimate, filters left at zero until
  /// initialize_filters().
  AgentControllerState initial_state() const;

  /// alpha_kf(0) = alpha_{k-1}(0), resolved level by level.
  void initialize_filters(AgentControllerState& state, std::span<const double> states,
                          double consensus_err) const;

  /// NN input chi_k = [x_1..x_k (, y0_hat)].
  Eigen::VectorXd nn_input(std::size_t level, std::span<const double> states,
                           double leader_estimate) const;

  /// `filter_outputs` are the alpha_kf the law reads (held or raw). When
  /// `leader_estimate_rate` is given it replaces the estimator rate inside
  /// alpha_1 (used for side-by-side diagnostics).
  ControlEvaluation evaluate(const AgentControllerState& state, std::span<const double> states,
                             std::span<const double> filter_outputs, double consensus_err,
                             std::optional<double> leader_estimate_rate = std::nullopt) const;

 private:
  ControllerGains gains_;
  std::vector<GaussianNetwork> networks_;
  bool leader_estimate_in_input_;
};

}  // namespace neurotrig
