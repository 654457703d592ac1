#include "neurotrig/sim.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "neurotrig/errors.hpp"

namespace neurotrig {

std::string to_string(ControlMode mode) {
  return mode == ControlMode::kContinuous ? "continuous" : "triggered";
}

std::string to_string(PlantFamily family) {
  switch (family) {
    case PlantFamily::kDemo4:
      return "demo4";
    case PlantFamily::kInSpan:
      return "in_span";
    case PlantFamily::kIntegrator:
      return "integrator";
  }
  return "?";
}

ReferenceSignal::Sample ReferenceSignal::operator()(double t) const {
  Sample s{offset, 0.0};
  for (std::size_t k = 0; k < amplitudes.size(); ++k) {
    s.value += amplitudes[k] * std::sin(frequencies[k] * t);
    s.rate += amplitudes[k] * frequencies[k] * std::cos(frequencies[k] * t);
  }
  return s;
}

ReferenceSignal ReferenceSignal::demo() { return {0.0, {0.5, 0.5}, {0.1, 0.05}}; }

ReferenceSignal ReferenceSignal::constant(double value) { return {value, {}, {}}; }

ReferenceSignal::Sample reference_signal(double t) { return ReferenceSignal::demo()(t); }

GaussianNetwork BasisLayout::network(std::size_t level) const {
  return GaussianNetwork::uniform_grid(nodes, level + (include_leader_estimate ? 1 : 0), lo, hi,
                                       width);
}

Thresholds Thresholds::uniform(std::size_t agents, std::size_t order, double state,
                               double filter, double leader) {
  Thresholds t;
  t.state.assign(agents, std::vector<double>(order, state));
  t.filter.assign(agents, std::vector<double>(order > 0 ? order - 1 : 0, filter));
  t.leader = leader;
  return t;
}

void Thresholds::set_state(double value) {
  for (auto& row : state) row.assign(row.size(), value);
}

void Thresholds::set_filter(double value) {
  for (auto& row : filter) row.assign(row.size(), value);
}

std::size_t Scenario::steps() const {
  return static_cast<std::size_t>(std::llround(run.horizon / run.step));
}

void Scenario::validate() const {
  const auto report = neurotrig::validate(topology);
  if (!report.ok()) throw ValidationError("invalid topology: " + report.to_string());
  const std::size_t n_agents = agents();
  const std::size_t n = plant.order;

  if (!(run.step > 0.0) || !std::isfinite(run.step)) {
    throw ValidationError("run: step must be positive");
  }
  if (!(run.horizon >= run.step) || !std::isfinite(run.horizon)) {
    throw ValidationError("run: horizon must be at least one step");
  }
  if (run.output_stride == 0) throw ValidationError("run: output_stride must be positive");
  if (n == 0) throw ValidationError("plant: order must be positive");
  if (plant.initial_states.size() != n_agents) {
    throw ValidationError("plant: need initial states for " + std::to_string(n_agents) +
                          " agents, got " + std::to_string(plant.initial_states.size()));
  }
  for (const auto& x0 : plant.initial_states) {
    if (x0.size() != n) {
      throw ValidationError("plant: every initial state needs " + std::to_string(n) + " entries");
    }
    for (double v : x0) {
      if (!std::isfinite(v)) throw ValidationError("plant: non-finite initial state");
    }
  }
  switch (plant.family) {
    case PlantFamily::kDemo4:
      if (n_agents != 4 || n != 2) {
        throw ValidationError("plant: demo4 family needs 4 agents of order 2");
      }
      break;
    case PlantFamily::kInSpan:
      if (basis.include_leader_estimate) {
        throw ValidationError(
            "plant: in_span family needs basis.include_leader_estimate = false");
      }
      if (plant.ideal_weights.size() != n) {
        throw ValidationError("plant: in_span family needs one ideal weight vector per level");
      }
      for (const auto& w : plant.ideal_weights) {
        if (w.size() != basis.nodes) {
          throw ValidationError("plant: ideal weight vectors need " +
                                std::to_string(basis.nodes) + " entries");
        }
      }
      break;
    case PlantFamily::kIntegrator:
      break;
  }
  if (basis.nodes == 0 || !(basis.width > 0.0) || !(basis.hi > basis.lo)) {
    throw ValidationError("basis: need nodes > 0, width > 0 and lo < hi");
  }
  if (gains.size() != n_agents) {
    throw ValidationError("gains: need " + std::to_string(n_agents) + " gain sets, got " +
                          std::to_string(gains.size()));
  }
  for (const auto& g : gains) {
    try {
      g.validate(n);
    } catch (const MalformedInputError& e) {
      throw ValidationError(e.what());
    }
  }
  if (run.mode == ControlMode::kTriggered) {
    if (thresholds.state.size() != n_agents || thresholds.filter.size() != n_agents) {
      throw ValidationError("thresholds: need one row per agent");
    }
    for (std::size_t i = 0; i < n_agents; ++i) {
      if (thresholds.state[i].size() != n || thresholds.filter[i].size() != n - 1) {
        throw ValidationError("thresholds: agent " + std::to_string(i + 1) + " needs " +
                              std::to_string(n) + " state and " + std::to_string(n - 1) +
                              " filter thresholds");
      }
      for (double v : thresholds.state[i]) {
        if (!(v > 0.0)) throw ValidationError("thresholds: state thresholds must be positive");
      }
      for (double v : thresholds.filter[i]) {
        if (!(v > 0.0)) throw ValidationError("thresholds: filter thresholds must be positive");
      }
    }
    if (!(thresholds.leader > 0.0)) {
      throw ValidationError("thresholds: leader threshold must be positive");
    }
  }
  if (reference.amplitudes.size() != reference.frequencies.size()) {
    throw ValidationError("reference: amplitudes and frequencies differ in length");
  }
}

std::vector<std::string> Scenario::warnings() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    for (std::size_t k = 0; k < gains[i].mu_filter.size(); ++k) {
      const double mu = gains[i].mu_filter[k];
      if (mu > 0.0 && 1.0 / mu <= 0.75) {
        std::ostringstream os;
        os << "agent " << i + 1 << ": filter time constant mu_" << k + 2 << " = " << mu
           << " gives 1/mu <= 3/4; the stability condition on mu cannot hold";
        out.push_back(os.str());
      }
    }
  }
  return out;
}

Scenario Scenario::demo() {
  Scenario s;
  s.topology = DirectedTopology::ring(4);
  s.plant.family = PlantFamily::kDemo4;
  s.plant.order = 2;
  s.plant.initial_states.assign(4, {1.0, 0.0});
  s.basis = BasisLayout{};
  s.gains.assign(4, ControllerGains::demo());
  s.thresholds = Thresholds::uniform(4, 2, 0.01, 0.02, 0.005);
  s.reference = ReferenceSignal::demo();
  s.run = RunSettings{};
  return s;
}

Scenario Scenario::in_span_demo(std::uint64_t seed) {
  Scenario s = demo();
  s.plant.family = PlantFamily::kInSpan;
  s.basis.nodes = 9;
  s.basis.include_leader_estimate = false;
  s.run.seed = seed;
  s.plant.ideal_weights = sample_ideal_weights(2, 9, seed, 0.5);
  return s;
}

std::vector<std::vector<double>> sample_ideal_weights(std::size_t order, std::size_t nodes,
                                                      std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<std::vector<double>> w(order, std::vector<double>(nodes));
  for (auto& level : w) {
    for (auto& v : level) v = dist(rng);
  }
  return w;
}

namespace {

struct AgentRuntime {
  StrictFeedbackPlant plant;
  AgentController controller;
  std::vector<TriggerChannel> state_channels;
  std::vector<TriggerChannel> filter_channels;
  std::vector<NeighborOutput> neighbors;  // weights filled once, outputs each step
  std::vector<std::size_t> neighbor_index;
  double leader_gain = 0.0;
  std::size_t offset = 0;  // first slot in the augmented state

  // Inputs held constant across one integration step.
  double control = 0.0;
  std::vector<double> filter_drive;
  std::vector<Eigen::VectorXd> weight_basis;
  Eigen::VectorXd weight_error;
  double estimator_error = 0.0;
};

// Augmented state per agent: [x_1..x_n | alpha_2f..alpha_nf | y0_hat | W_1 | ... | W_n].
struct Layout {
  std::size_t order = 0;
  std::vector<std::size_t> nodes;
  std::size_t filter_offset() const { return order; }
  std::size_t estimate_offset() const { return 2 * order - 1; }
  std::size_t weight_offset(std::size_t level) const {
    std::size_t off = 2 * order;
    for (std::size_t k = 1; k < level; ++k) off += nodes[k - 1];
    return off;
  }
  std::size_t size() const { return weight_offset(order + 1); }
};

std::vector<Nonlinearity> make_nonlinearities(const Scenario& s, std::size_t agent) {
  switch (s.plant.family) {
    case PlantFamily::kDemo4:
      return demo_nonlinearities(agent + 1);
    case PlantFamily::kIntegrator:
      return zero_nonlinearities(s.plant.order);
    case PlantFamily::kInSpan: {
      std::vector<GaussianNetwork> nets;
      std::vector<Eigen::VectorXd> weights;
      for (std::size_t k = 1; k <= s.plant.order; ++k) {
        nets.push_back(s.basis.network(k));
        const auto& w = s.plant.ideal_weights[k - 1];
        weights.emplace_back(
            Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())));
      }
      return in_span_nonlinearities(std::move(nets), std::move(weights));
    }
  }
  throw MalformedInputError("unknown plant family");
}

AgentControllerState unpack_controller_state(const AgentController& ctl, const Layout& layout,
                                             const Eigen::VectorXd& y, std::size_t offset) {
  AgentControllerState st = ctl.initial_state();
  const auto off = static_cast<Eigen::Index>(offset);
  for (std::size_t k = 0; k + 1 < layout.order; ++k) {
    st.filter_states[k] = y(off + static_cast<Eigen::Index>(layout.filter_offset() + k));
  }
  st.leader_estimate = y(off + static_cast<Eigen::Index>(layout.estimate_offset()));
  for (std::size_t k = 1; k <= layout.order; ++k) {
    st.weight_estimates[k - 1].weights =
        y.segment(off + static_cast<Eigen::Index>(layout.weight_offset(k)),
                  static_cast<Eigen::Index>(layout.nodes[k - 1]));
  }
  return st;
}

void ensure_finite(double v, std::size_t step, double t, const std::string& name) {
  if (!std::isfinite(v)) throw DivergenceError(step, t, name);
}

}  // namespace

TrajectoryRecord run(const Scenario& scenario) {
  scenario.validate();
  const std::size_t n_agents = scenario.agents();
  const std::size_t n = scenario.plant.order;
  const std::size_t steps = scenario.steps();
  const double h = scenario.run.step;
  const bool triggered = scenario.run.mode == ControlMode::kTriggered;
  const bool in_span = scenario.plant.family == PlantFamily::kInSpan;

  Layout layout;
  layout.order = n;
  std::vector<GaussianNetwork> networks;
  for (std::size_t k = 1; k <= n; ++k) {
    networks.push_back(scenario.basis.network(k));
    layout.nodes.push_back(networks.back().nodes());
  }
  std::vector<Eigen::VectorXd> ideal;
  if (in_span) {
    for (const auto& w : scenario.plant.ideal_weights) {
      ideal.emplace_back(
          Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())));
    }
  }

  std::vector<AgentRuntime> agents;
  agents.reserve(n_agents);
  const std::size_t block = layout.size();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(block * n_agents));
  const ReferenceSignal& reference = scenario.reference;

  for (std::size_t i = 0; i < n_agents; ++i) {
    AgentRuntime a{StrictFeedbackPlant(make_nonlinearities(scenario, i)),
                   AgentController(scenario.gains[i], networks,
                                   scenario.basis.include_leader_estimate),
                   {}, {}, {}, {}, scenario.topology.leader_gains(static_cast<Eigen::Index>(i)),
                   i * block, 0.0, {}, {}, {}, 0.0};
    for (std::size_t j : scenario.topology.neighbors(i)) {
      a.neighbors.push_back(
          {scenario.topology.adjacency(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
           0.0});
      a.neighbor_index.push_back(j);
    }
    a.filter_drive.assign(n - 1, 0.0);
    a.weight_basis.resize(n);
    a.weight_error = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      y(static_cast<Eigen::Index>(a.offset + k)) = scenario.plant.initial_states[i][k];
    }
    agents.push_back(std::move(a));
  }

  // Initial filter states alpha_kf(0) = alpha_{k-1}(0), from t = 0 signals.
  const auto y0_initial = reference(0.0);
  std::vector<double> outputs(n_agents);
  for (std::size_t i = 0; i < n_agents; ++i) outputs[i] = scenario.plant.initial_states[i][0];
  for (std::size_t i = 0; i < n_agents; ++i) {
    auto& a = agents[i];
    for (std::size_t m = 0; m < a.neighbors.size(); ++m) {
      a.neighbors[m].output = outputs[a.neighbor_index[m]];
    }
    const double e = consensus_error(outputs[i], a.neighbors, y0_initial.value, a.leader_gain);
    AgentControllerState st = a.controller.initial_state();
    a.controller.initialize_filters(st, scenario.plant.initial_states[i], e);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      y(static_cast<Eigen::Index>(a.offset + layout.filter_offset() + k)) = st.filter_states[k];
    }
  }

  std::optional<TriggerChannel> leader_channel;
  if (triggered) {
    leader_channel.emplace(SignalId::leader(), scenario.thresholds.leader, y0_initial.value, 0.0);
    for (std::size_t i = 0; i < n_agents; ++i) {
      auto& a = agents[i];
      for (std::size_t k = 0; k < n; ++k) {
        a.state_channels.emplace_back(SignalId::state(i + 1, k + 1),
                                      scenario.thresholds.state[i][k],
                                      y(static_cast<Eigen::Index>(a.offset + k)), 0.0);
      }
      for (std::size_t k = 0; k + 1 < n; ++k) {
        a.filter_channels.emplace_back(
            SignalId::filter_output(i + 1, k + 2), scenario.thresholds.filter[i][k],
            y(static_cast<Eigen::Index>(a.offset + layout.filter_offset() + k)), 0.0);
      }
    }
  }

  TrajectoryRecord rec;
  rec.mode = scenario.run.mode;
  rec.step = h;
  rec.order = n;
  const std::size_t samples = steps + 1;
  rec.time.reserve(samples);
  rec.reference.reserve(samples);
  rec.reference_held.reserve(samples);
  rec.agents.resize(n_agents);
  const auto sized = [&](std::size_t rows) {
    std::vector<std::vector<double>> v(rows);
    for (auto& r : v) r.reserve(samples);
    return v;
  };
  for (auto& s : rec.agents) {
    s.x = sized(n);
    s.x_held = sized(n);
    s.filter = sized(n - 1);
    s.filter_held = sized(n - 1);
    s.z = sized(n);
    s.z_held = sized(n);
    s.alpha = sized(n);
    s.alpha_held = sized(n);
    s.weight_norm = sized(n);
    s.weight_error_norm = sized(in_span ? n : 0);
    for (auto* v : {&s.control, &s.tracking_error, &s.consensus_error, &s.consensus_error_held,
                    &s.leader_estimate}) {
      v->reserve(samples);
    }
  }

  std::vector<double> x_raw(n), x_held(n), f_raw(n - 1), f_held(n - 1);
  std::vector<double> held_outputs(n_agents), raw_outputs(n_agents);

  std::size_t current_step = 0;
  const auto rates = [&](const Eigen::VectorXd& state) {
    Eigen::VectorXd d(state.size());
    std::vector<double> xs(n), dx(n);
    for (std::size_t i = 0; i < n_agents; ++i) {
      const auto& a = agents[i];
      const auto off = static_cast<Eigen::Index>(a.offset);
      for (std::size_t k = 0; k < n; ++k) {
        xs[k] = state(off + static_cast<Eigen::Index>(k));
        ensure_finite(xs[k], current_step, static_cast<double>(current_step) * h,
                      SignalId::state(i + 1, k + 1).to_string());
      }
      a.plant.dynamics(xs, a.control, dx);
      for (std::size_t k = 0; k < n; ++k) d(off + static_cast<Eigen::Index>(k)) = dx[k];
      const auto& g = a.controller.gains();
      for (std::size_t k = 0; k + 1 < n; ++k) {
        const auto idx = off + static_cast<Eigen::Index>(layout.filter_offset() + k);
        d(idx) = filter_rate(a.filter_drive[k], state(idx), g.mu_filter[k]);
      }
      const auto est = off + static_cast<Eigen::Index>(layout.estimate_offset());
      d(est) = leader_estimator_rate(g, a.estimator_error, state(est));
      for (std::size_t k = 1; k <= n; ++k) {
        const auto w_off = off + static_cast<Eigen::Index>(layout.weight_offset(k));
        const auto p = static_cast<Eigen::Index>(layout.nodes[k - 1]);
        d.segment(w_off, p) = weight_update_rate(g.gamma_w[k - 1], g.sigma_w[k - 1],
                                                 state.segment(w_off, p), a.weight_basis[k - 1],
                                                 a.weight_error(static_cast<Eigen::Index>(k - 1)));
      }
    }
    return d;
  };

  for (std::size_t s = 0; s <= steps; ++s) {
    const double t = static_cast<double>(s) * h;

    // (1) leader broadcast
    const auto ref = reference(t);
    const double y0_held = triggered ? leader_channel->process_sample(t, ref.value).held : ref.value;

    // (2), (3) state and filter-output broadcasts
    for (std::size_t i = 0; i < n_agents; ++i) {
      auto& a = agents[i];
      const auto off = static_cast<Eigen::Index>(a.offset);
      raw_outputs[i] = y(off);
      if (triggered) {
        for (std::size_t k = 0; k < n; ++k) {
          a.state_channels[k].process_sample(t, y(off + static_cast<Eigen::Index>(k)));
        }
        for (std::size_t k = 0; k + 1 < n; ++k) {
          a.filter_channels[k].process_sample(
              t, y(off + static_cast<Eigen::Index>(layout.filter_offset() + k)));
        }
        held_outputs[i] = a.state_channels[0].held();
      } else {
        held_outputs[i] = raw_outputs[i];
      }
    }

    // (4) control update
    rec.time.push_back(t);
    rec.reference.push_back(ref.value);
    rec.reference_held.push_back(y0_held);
    for (std::size_t i = 0; i < n_agents; ++i) {
      auto& a = agents[i];
      auto& out = rec.agents[i];
      const auto off = static_cast<Eigen::Index>(a.offset);
      const AgentControllerState st = unpack_controller_state(a.controller, layout, y, a.offset);
      for (std::size_t k = 0; k < n; ++k) {
        x_raw[k] = y(off + static_cast<Eigen::Index>(k));
        x_held[k] = triggered ? a.state_channels[k].held() : x_raw[k];
        ensure_finite(x_raw[k], s, t, SignalId::state(i + 1, k + 1).to_string());
      }
      for (std::size_t k = 0; k + 1 < n; ++k) {
        f_raw[k] = y(off + static_cast<Eigen::Index>(layout.filter_offset() + k));
        f_held[k] = triggered ? a.filter_channels[k].held() : f_raw[k];
        ensure_finite(f_raw[k], s, t, SignalId::filter_output(i + 1, k + 2).to_string());
      }
      ensure_finite(st.leader_estimate, s, t, "agent" + std::to_string(i + 1) + ".y0_hat");
      for (std::size_t k = 0; k < n; ++k) {
        if (!st.weight_estimates[k].weights.allFinite()) {
          throw DivergenceError(s, t, "agent" + std::to_string(i + 1) + ".W" + std::to_string(k + 1));
        }
      }

      for (std::size_t m = 0; m < a.neighbors.size(); ++m) {
        a.neighbors[m].output = held_outputs[a.neighbor_index[m]];
      }
      const double e_held = consensus_error(held_outputs[i], a.neighbors, y0_held, a.leader_gain);
      for (std::size_t m = 0; m < a.neighbors.size(); ++m) {
        a.neighbors[m].output = raw_outputs[a.neighbor_index[m]];
      }
      const double e_raw = consensus_error(raw_outputs[i], a.neighbors, ref.value, a.leader_gain);

      const ControlEvaluation applied = a.controller.evaluate(st, x_held, f_held, e_held);
      const ControlEvaluation diag =
          triggered ? a.controller.evaluate(st, x_raw, f_raw, e_raw, applied.leader_estimate_rate)
                    : applied;
      ensure_finite(applied.control, s, t, "agent" + std::to_string(i + 1) + ".u");

      for (std::size_t k = 0; k < n; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        out.x[k].push_back(x_raw[k]);
        out.x_held[k].push_back(x_held[k]);
        out.z[k].push_back(diag.z(kk));
        out.z_held[k].push_back(applied.z(kk));
        out.alpha[k].push_back(diag.alpha(kk));
        out.alpha_held[k].push_back(applied.alpha(kk));
        out.weight_norm[k].push_back(st.weight_estimates[k].weights.norm());
        if (in_span) out.weight_error_norm[k].push_back((ideal[k] - st.weight_estimates[k].weights).norm());
      }
      for (std::size_t k = 0; k + 1 < n; ++k) {
        out.filter[k].push_back(f_raw[k]);
        out.filter_held[k].push_back(f_held[k]);
      }
      out.control.push_back(applied.control);
      out.tracking_error.push_back(x_raw[0] - ref.value);
      out.consensus_error.push_back(e_raw);
      out.consensus_error_held.push_back(e_held);
      out.leader_estimate.push_back(st.leader_estimate);

      a.control = applied.control;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        a.filter_drive[k] = applied.alpha(static_cast<Eigen::Index>(k));
      }
      for (std::size_t k = 0; k < n; ++k) a.weight_basis[k] = applied.basis[k];
      a.weight_error = applied.z;
      a.estimator_error = e_held;
    }

    if (s == steps) break;

    // (5), (6) one RK4 step with the discrete inputs frozen
    current_step = s;
    try {
      y = rk4_step(rates, y, h);
    } catch (const MalformedInputError& e) {
      throw DivergenceError(s, t, std::string("integration stage (") + e.what() + ")");
    }
  }

  if (triggered) {
    rec.channels.push_back({leader_channel->id(), leader_channel->threshold(),
                            leader_channel->events()});
    for (const auto& a : agents) {
      for (const auto& c : a.state_channels) rec.channels.push_back({c.id(), c.threshold(), c.events()});
      for (const auto& c : a.filter_channels) rec.channels.push_back({c.id(), c.threshold(), c.events()});
    }
  }
  return rec;
}

}  // namespace neurotrig
