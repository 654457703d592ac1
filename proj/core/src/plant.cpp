#include "neurotrig/plant.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "neurotrig/errors.hpp"

namespace neurotrig {

StrictFeedbackPlant::StrictFeedbackPlant(std::vector<Nonlinearity> nonlinearities)
    : f_(std::move(nonlinearities)) {
  if (f_.empty()) throw MalformedInputError("plant: order must be at least 1");
  for (const auto& f : f_) {
    if (!f) throw MalformedInputError("plant: empty nonlinearity");
  }
}

double StrictFeedbackPlant::nonlinearity(std::size_t k, std::span<const double> state) const {
  if (k == 0 || k > f_.size() || state.size() < k) {
    throw MalformedInputError("plant: nonlinearity level out of range");
  }
  return f_[k - 1](state.first(k));
}

void StrictFeedbackPlant::dynamics(std::span<const double> state, double control,
                                   std::span<double> rates) const {
  const std::size_t n = f_.size();
  if (state.size() != n || rates.size() != n) {
    throw MalformedInputError("plant: state has " + std::to_string(state.size()) +
                              " entries, expected " + std::to_string(n));
  }
  if (!std::isfinite(control)) throw MalformedInputError("plant: control is not finite");
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(state[k])) {
      throw MalformedInputError("plant: state x" + std::to_string(k + 1) + " is not finite");
    }
  }
  for (std::size_t k = 0; k + 1 < n; ++k) rates[k] = state[k + 1] + f_[k](state.first(k + 1));
  rates[n - 1] = control + f_[n - 1](state);
}

Eigen::VectorXd StrictFeedbackPlant::dynamics(const Eigen::VectorXd& state, double control) const {
  Eigen::VectorXd rates(state.size());
  dynamics(std::span<const double>(state.data(), static_cast<std::size_t>(state.size())), control,
           std::span<double>(rates.data(), static_cast<std::size_t>(rates.size())));
  return rates;
}

std::vector<Nonlinearity> demo_nonlinearities(std::size_t agent_index) {
  if (agent_index < 1 || agent_index > 4) {
    throw MalformedInputError("demo_nonlinearities: agent index " +
                              std::to_string(agent_index) + " outside 1..4");
  }
  const double power = static_cast<double>(agent_index);
  return {
      [](std::span<const double> x) { return 0.5 * std::sin(0.1 * x[0]); },
      [power](std::span<const double> x) {
        return 0.1 * std::sin(x[0] * x[1]) + 0.2 * std::exp(-std::pow(std::abs(x[0]), power) + 1.0);
      },
  };
}

std::vector<Nonlinearity> zero_nonlinearities(std::size_t order) {
  return std::vector<Nonlinearity>(order, [](std::span<const double>) { return 0.0; });
}

std::vector<Nonlinearity> in_span_nonlinearities(std::vector<GaussianNetwork> networks,
                                                 std::vector<Eigen::VectorXd> ideal_weights) {
  if (networks.size() != ideal_weights.size()) {
    throw MalformedInputError("in_span plant: one weight vector per level required");
  }
  std::vector<Nonlinearity> out;
  for (std::size_t k = 0; k < networks.size(); ++k) {
    if (networks[k].input_dim() != k + 1) {
      throw MalformedInputError("in_span plant: level " + std::to_string(k + 1) +
                                " network must take " + std::to_string(k + 1) + " inputs");
    }
    if (static_cast<std::size_t>(ideal_weights[k].size()) != networks[k].nodes()) {
      throw MalformedInputError("in_span plant: weight size mismatch at level " +
                                std::to_string(k + 1));
    }
    auto net = std::make_shared<const GaussianNetwork>(std::move(networks[k]));
    auto w = std::make_shared<const Eigen::VectorXd>(std::move(ideal_weights[k]));
    out.emplace_back([net, w](std::span<const double> x) {
      const Eigen::VectorXd input =
          Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
      return w->dot(net->eval(input));
    });
  }
  return out;
}

}  // namespace neurotrig
