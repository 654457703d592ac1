#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "neurotrig/controller.hpp"
#include "neurotrig/plant.hpp"
#include "neurotrig/topology.hpp"
#include "neurotrig/trigger.hpp"

namespace neurotrig {

enum class ControlMode { kContinuous, kTriggered };
enum class PlantFamily { kDemo4, kInSpan, kIntegrator };

std::string to_string(ControlMode mode);
std::string to_string(PlantFamily family);

/// y0(t) = offset + sum_k a_k sin(w_k t).
struct ReferenceSignal {
  double offset = 0.0;
  std::vector<double> amplitudes;
  std::vector<double> frequencies;

  struct Sample {
    double value = 0.0;
    double rate = 0.0;
  };
  Sample operator()(double t) const;

  /// 0.5 sin(0.1 t) + 0.5 sin(0.05 t).
  static ReferenceSignal demo();
  static ReferenceSignal constant(double value);

  friend bool operator==(const ReferenceSignal&, const ReferenceSignal&) = default;
};

/// Demo reference value and derivative at t (t >= 0).
ReferenceSignal::Sample reference_signal(double t);

struct BasisLayout {
  std::size_t nodes = 25;
  double lo = -5.0;
  double hi = 5.0;
  double width = 2.0;
  /// Append y0_hat to every NN input vector.
  bool include_leader_estimate = true;

  /// Network for level k (1-based).
  GaussianNetwork network(std::size_t level) const;

  friend bool operator==(const BasisLayout&, const BasisLayout&) = default;
};

struct PlantSpec {
  PlantFamily family = PlantFamily::kDemo4;
  std::size_t order = 2;
  std::vector<std::vector<double>> initial_states;  // [agent][level]
  std::vector<std::vector<double>> ideal_weights;   // [level][node], in-span family only

  friend bool operator==(const PlantSpec&, const PlantSpec&) = default;
};

struct Thresholds {
  std::vector<std::vector<double>> state;   // [agent][level - 1]
  std::vector<std::vector<double>> filter;  // [agent][level - 2]
  double leader = 0.005;

  static Thresholds uniform(std::size_t agents, std::size_t order, double state,
                            double filter, double leader);
  void set_state(double value);
  void set_filter(double value);

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

struct RunSettings {
  double horizon = 100.0;
  double step = 0.001;
  ControlMode mode = ControlMode::kTriggered;
  std::uint64_t seed = 0;
  std::size_t output_stride = 1;

  friend bool operator==(const RunSettings&, const RunSettings&) = default;
};

/// Complete description of one closed-loop experiment.
struct Scenario {
  DirectedTopology topology;
  PlantSpec plant;
  BasisLayout basis;
  std::vector<ControllerGains> gains;  // one per agent
  Thresholds thresholds;
  ReferenceSignal reference;
  RunSettings run;

  std::size_t agents() const { return topology.size(); }
  /// Number of integration steps, round(horizon / step).
  std::size_t steps() const;

  /// Throws MalformedInputError for inconsistent shapes and
  /// ValidationError for assumption violations.
  void validate() const;
  /// Non-fatal advisories, e.g. filter time constants with 1/mu <= 3/4.
  std::vector<std::string> warnings() const;

  /// Four agents on the unit ring with the leader pinned to agent 1, and
  /// every demonstration parameter.
  static Scenario demo();
  /// Two-level in-span plant with 9-node networks and seeded ideal weights.
  static Scenario in_span_demo(std::uint64_t seed = 7);
};

/// Ideal weights for the in-span plant, uniform in [-scale, scale].
std::vector<std::vector<double>> sample_ideal_weights(std::size_t order, std::size_t nodes,
                                                      std::uint64_t seed, double scale);

/// Per-agent time series. Held quantities equal raw ones in continuous mode.
struct AgentSeries {
  std::vector<std::vector<double>> x;            // [level-1][step]
  std::vector<std::vector<double>> x_held;       // [level-1][step]
  std::vector<std::vector<double>> filter;       // [level-2][step]
  std::vector<std::vector<double>> filter_held;  // [level-2][step]
  std::vector<double> control;
  std::vector<double> tracking_error;            // x_1 - y0
  std::vector<double> consensus_error;           // from raw outputs
  std::vector<double> consensus_error_held;      // from broadcast outputs
  std::vector<double> leader_estimate;
  std::vector<std::vector<double>> z;            // raw-signal tracking errors
  std::vector<std::vector<double>> z_held;       // errors the controller used
  std::vector<std::vector<double>> alpha;        // raw-signal virtual controls
  std::vector<std::vector<double>> alpha_held;   // virtual controls applied
  std::vector<std::vector<double>> weight_norm;  // |W_hat_k|
  std::vector<std::vector<double>> weight_error_norm;  // |W_k - W_hat_k|, in-span only
};

struct TrajectoryRecord {
  ControlMode mode = ControlMode::kTriggered;
  double step = 0.0;
  std::size_t order = 0;
  std::vector<double> time;
  std::vector<double> reference;
  std::vector<double> reference_held;
  std::vector<AgentSeries> agents;
  std::vector<ChannelLog> channels;  // empty in continuous mode

  std::size_t samples() const { return time.size(); }
  bool has_weight_errors() const {
    return !agents.empty() && !agents.front().weight_error_norm.empty() &&
           !agents.front().weight_error_norm.front().empty();
  }
};

/// Classical fourth-order Runge-Kutta step of dy/dt = rates(y).
template <class Rates>
Eigen::VectorXd rk4_step(const Rates& rates, const Eigen::VectorXd& y, double h) {
  const Eigen::VectorXd k1 = rates(y);
  const Eigen::VectorXd k2 = rates((y + 0.5 * h * k1).eval());
  const Eigen::VectorXd k3 = rates((y + 0.5 * h * k2).eval());
  const Eigen::VectorXd k4 = rates((y + h * k3).eval());
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Fixed-step closed-loop run. Each step: leader channel, state channels,
/// filter-output channels, control update from held values, then one RK4
/// step of the plant, filters, weights and leader estimates with the
/// control and all broadcast values held constant.
/// Throws ValidationError for an invalid scenario and DivergenceError when a
/// signal becomes non-finite.
TrajectoryRecord run(const Scenario& scenario);

}  // namespace neurotrig
