#include "neurotrig/controller.hpp"

#include <string>

#include "neurotrig/errors.hpp"

namespace neurotrig {
namespace {

void require_positive(const std::vector<double>& v, std::size_t expected, const char* name) {
  if (v.size() != expected) {
    throw MalformedInputError(std::string("gains: ") + name + " needs " +
                              std::to_string(expected) + " entries, got " +
                              std::to_string(v.size()));
  }
  for (double x : v) {
    if (!(x > 0.0)) throw MalformedInputError(std::string("gains: ") + name + " must be positive");
  }
}

}  // namespace

void ControllerGains::validate(std::size_t order) const {
  if (order == 0) throw MalformedInputError("gains: order must be positive");
  if (!(kappa1 > 0.0)) throw MalformedInputError("gains: kappa1 must be positive");
  if (!(gamma_y0 > 0.0)) throw MalformedInputError("gains: gamma_y0 must be positive");
  if (!(sigma_y0 > 0.0)) throw MalformedInputError("gains: sigma_y0 must be positive");
  require_positive(c, order, "c");
  require_positive(sigma_w, order, "sigma_w");
  require_positive(gamma_w, order, "gamma_w");
  require_positive(mu_filter, order - 1, "mu_filter");
}

ControllerGains ControllerGains::demo() {
  ControllerGains g;
  g.kappa1 = 0.5;
  g.c = {5.0, 5.0};
  g.gamma_y0 = 1.5;
  g.sigma_y0 = 0.001;
  g.sigma_w = {20.0, 20.0};
  g.gamma_w = {0.005, 0.005};
  g.mu_filter = {0.2};
  return g;
}

double consensus_error(double own_output, std::span<const NeighborOutput> neighbors,
                       double leader_output, double leader_gain) {
  double e = 0.0;
  for (const auto& nb : neighbors) e += nb.weight * (own_output - nb.output);
  return e + leader_gain * (own_output - leader_output);
}

Eigen::VectorXd tracking_errors(std::span<const double> states, double leader_estimate,
                                std::span<const double> filter_outputs) {
  if (states.empty() || filter_outputs.size() + 1 != states.size()) {
    throw MalformedInputError("tracking_errors: need n states and n - 1 filter outputs");
  }
  Eigen::VectorXd z(static_cast<Eigen::Index>(states.size()));
  z(0) = states[0] - leader_estimate;
  for (std::size_t k = 1; k < states.size(); ++k) {
    z(static_cast<Eigen::Index>(k)) = states[k] - filter_outputs[k - 1];
  }
  return z;
}

double virtual_control_1(const ControllerGains& gains, double consensus_err, double z1,
                         const Eigen::VectorXd& basis, const Eigen::VectorXd& weights,
                         double leader_estimate_rate) {
  return -gains.kappa1 * consensus_err - (gains.c.at(0) + 1.0) * z1 - weights.dot(basis) +
         leader_estimate_rate;
}

double filter_rate(double alpha_prev, double alpha_f, double mu) {
  if (!(mu > 0.0)) throw MalformedInputError("filter_rate: time constant must be positive");
  return (alpha_prev - alpha_f) / mu;
}

double virtual_control_k(const ControllerGains& gains, std::size_t level, double z_k,
                         double z_prev, const Eigen::VectorXd& basis,
                         const Eigen::VectorXd& weights, double alpha_prev, double alpha_f) {
  if (level < 2 || level > gains.c.size()) {
    throw MalformedInputError("virtual_control_k: level " + std::to_string(level) +
                              " out of range");
  }
  return -(gains.c[level - 1] + 1.0) * z_k - z_prev - weights.dot(basis) +
         filter_rate(alpha_prev, alpha_f, gains.mu_filter.at(level - 2));
}

double control_input(std::span<const double> virtual_controls) {
  if (virtual_controls.empty()) throw MalformedInputError("control_input: no virtual controls");
  return virtual_controls.back();
}

double leader_estimator_rate(const ControllerGains& gains, double consensus_err,
                             double leader_estimate) {
  return -gains.gamma_y0 * consensus_err - gains.gamma_y0 * gains.sigma_y0 * leader_estimate;
}

AgentController::AgentController(ControllerGains gains, std::vector<GaussianNetwork> networks,
                                 bool leader_estimate_in_nn_input)
    : gains_(std::move(gains)),
      networks_(std::move(networks)),
      leader_estimate_in_input_(leader_estimate_in_nn_input) {
  gains_.validate(networks_.size());
  for (std::size_t k = 0; k < networks_.size(); ++k) {
    const std::size_t expected = k + 1 + (leader_estimate_in_input_ ? 1 : 0);
    if (networks_[k].input_dim() != expected) {
      throw MalformedInputError("controller: level " + std::to_string(k + 1) +
                                " network takes " + std::to_string(networks_[k].input_dim()) +
                                " inputs, expected " + std::to_string(expected));
    }
  }
}

AgentControllerState AgentController::initial_state() const {
  AgentControllerState s;
  for (std::size_t k = 0; k < networks_.size(); ++k) {
    s.weight_estimates.emplace_back(
        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(networks_[k].nodes())), gains_.gamma_w[k],
        gains_.sigma_w[k]);
  }
  s.leader_estimate = 0.0;
  s.filter_states.assign(networks_.size() - 1, 0.0);
  return s;
}

void AgentController::initialize_filters(AgentControllerState& state,
                                         std::span<const double> states,
                                         double consensus_err) const {
  // alpha_{k-1} depends only on filters below level k, so one pass suffices.
  for (std::size_t k = 2; k <= order(); ++k) {
    const auto eval = evaluate(state, states, state.filter_states, consensus_err);
    state.filter_states[k - 2] = eval.alpha(static_cast<Eigen::Index>(k - 2));
  }
}

Eigen::VectorXd AgentController::nn_input(std::size_t level, std::span<const double> states,
                                          double leader_estimate) const {
  const auto k = static_cast<Eigen::Index>(level);
  Eigen::VectorXd chi(k + (leader_estimate_in_input_ ? 1 : 0));
  for (Eigen::Index m = 0; m < k; ++m) chi(m) = states[static_cast<std::size_t>(m)];
  if (leader_estimate_in_input_) chi(k) = leader_estimate;
  return chi;
}

ControlEvaluation AgentController::evaluate(const AgentControllerState& state,
                                            std::span<const double> states,
                                            std::span<const double> filter_outputs,
                                            double consensus_err,
                                            std::optional<double> leader_estimate_rate) const {
  const std::size_t n = order();
  if (states.size() != n || filter_outputs.size() + 1 != n) {
    throw MalformedInputError("controller: expected " + std::to_string(n) + " states and " +
                              std::to_string(n - 1) + " filter outputs");
  }
  ControlEvaluation out;
  out.consensus_error = consensus_err;
  out.leader_estimate_rate =
      leader_estimate_rate.value_or(leader_estimator_rate(gains_, consensus_err, state.leader_estimate));
  out.z = tracking_errors(states, state.leader_estimate, filter_outputs);
  out.alpha.resize(static_cast<Eigen::Index>(n));
  out.basis.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) {
    out.basis.push_back(networks_[k - 1].eval(nn_input(k, states, state.leader_estimate)));
  }
  out.alpha(0) = virtual_control_1(gains_, consensus_err, out.z(0), out.basis[0],
                                   state.weight_estimates[0].weights, out.leader_estimate_rate);
  for (std::size_t k = 2; k <= n; ++k) {
    const auto kk = static_cast<Eigen::Index>(k - 1);
    out.alpha(kk) = virtual_control_k(gains_, k, out.z(kk), out.z(kk - 1), out.basis[k - 1],
                                      state.weight_estimates[k - 1].weights, out.alpha(kk - 1),
                                      filter_outputs[k - 2]);
  }
  out.control = control_input(std::span<const double>(out.alpha.data(), n));
  return out;
}

}  // namespace neurotrig
