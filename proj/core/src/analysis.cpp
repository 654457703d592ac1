#include "neurotrig/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "neurotrig/errors.hpp"

namespace neurotrig {
namespace {

std::string column_name(const SignalId& id) {
  switch (id.kind) {
    case SignalKind::kState:
      return "x" + std::to_string(id.level);
    case SignalKind::kFilterOutput:
      return "alpha" + std::to_string(id.level) + "f";
    case SignalKind::kLeaderOutput:
      return "y0";
  }
  return "?";
}

std::string row_name(const SignalId& id) {
  return id.kind == SignalKind::kLeaderOutput ? "Leader 0" : "Agent " + std::to_string(id.agent);
}

bool within(double deviation, double bound) {
  // Bounds are assembled from sums of doubles; allow for rounding only.
  return deviation <= bound + 1e-12 * (1.0 + std::abs(bound));
}

int sign_of(double d) { return (d > 0.0) - (d < 0.0); }

}  // namespace

std::vector<std::vector<double>> output_tracking_error(const TrajectoryRecord& record) {
  std::vector<std::vector<double>> out;
  out.reserve(record.agents.size());
  for (const auto& a : record.agents) {
    std::vector<double> eps(record.samples());
    for (std::size_t s = 0; s < eps.size(); ++s) eps[s] = a.x[0][s] - record.reference[s];
    out.push_back(std::move(eps));
  }
  return out;
}

double mean_square_norm(std::span<const double> time,
                        const std::vector<std::vector<double>>& errors, double horizon) {
  if (!(horizon > 0.0)) throw MalformedInputError("mean_square_norm: horizon must be positive");
  if (time.size() < 2) throw MalformedInputError("mean_square_norm: need at least two samples");
  const double t0 = time.front();
  if (horizon > time.back() - t0 + 1e-9 * std::max(1.0, horizon)) {
    throw MalformedInputError("mean_square_norm: horizon exceeds the record");
  }
  for (const auto& e : errors) {
    if (e.size() != time.size()) throw MalformedInputError("mean_square_norm: series length mismatch");
  }
  const double t_end = t0 + horizon;
  const auto sq_sum = [&](std::size_t s) {
    double v = 0.0;
    for (const auto& e : errors) v += e[s] * e[s];
    return v;
  };
  double integral = 0.0;
  for (std::size_t s = 1; s < time.size(); ++s) {
    if (time[s - 1] >= t_end) break;
    if (time[s] <= t_end) {
      integral += 0.5 * (time[s] - time[s - 1]) * (sq_sum(s - 1) + sq_sum(s));
    } else {
      const double frac = (t_end - time[s - 1]) / (time[s] - time[s - 1]);
      double at_end = 0.0;
      for (const auto& e : errors) {
        const double v = e[s - 1] + frac * (e[s] - e[s - 1]);
        at_end += v * v;
      }
      integral += 0.5 * (t_end - time[s - 1]) * (sq_sum(s - 1) + at_end);
      break;
    }
  }
  return std::sqrt(integral / horizon);
}

double mean_square_norm(const TrajectoryRecord& record, double horizon) {
  return mean_square_norm(record.time, output_tracking_error(record), horizon);
}

std::optional<std::size_t> CountTable::count(const SignalId& id) const {
  const auto r = std::find(rows.begin(), rows.end(), row_name(id));
  const auto c = std::find(columns.begin(), columns.end(), column_name(id));
  if (r == rows.end() || c == columns.end()) return std::nullopt;
  return counts[static_cast<std::size_t>(r - rows.begin())][static_cast<std::size_t>(c - columns.begin())];
}

std::string CountTable::format() const {
  if (empty()) return "(no trigger channels)\n";
  std::ostringstream os;
  os << std::left << std::setw(10) << "";
  for (const auto& c : columns) os << std::right << std::setw(10) << c;
  os << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    os << std::left << std::setw(10) << rows[r];
    for (const auto& v : counts[r]) {
      os << std::right << std::setw(10) << (v ? std::to_string(*v) : std::string("-"));
    }
    os << '\n';
  }
  return os.str();
}

CountTable trigger_count_table(const TrajectoryRecord& record) {
  CountTable table;
  if (record.channels.empty()) return table;
  std::vector<SignalId> agent_ids;
  bool has_leader = false;
  for (const auto& ch : record.channels) {
    const std::string col = column_name(ch.id);
    if (std::find(table.columns.begin(), table.columns.end(), col) == table.columns.end() &&
        ch.id.kind != SignalKind::kLeaderOutput) {
      table.columns.push_back(col);
    }
    if (ch.id.kind == SignalKind::kLeaderOutput) has_leader = true;
  }
  // States before filter outputs, each ordered by level.
  std::stable_sort(table.columns.begin(), table.columns.end(), [](const auto& a, const auto& b) {
    return (a[0] == 'x') > (b[0] == 'x');
  });
  if (has_leader) table.columns.push_back("y0");
  std::size_t agents = 0;
  for (const auto& ch : record.channels) agents = std::max(agents, ch.id.agent);
  for (std::size_t i = 1; i <= agents; ++i) table.rows.push_back("Agent " + std::to_string(i));
  if (has_leader) table.rows.push_back("Leader 0");
  table.counts.assign(table.rows.size(),
                      std::vector<std::optional<std::size_t>>(table.columns.size()));
  for (const auto& ch : record.channels) {
    const auto r = static_cast<std::size_t>(
        std::find(table.rows.begin(), table.rows.end(), row_name(ch.id)) - table.rows.begin());
    const auto c = static_cast<std::size_t>(
        std::find(table.columns.begin(), table.columns.end(), column_name(ch.id)) -
        table.columns.begin());
    table.counts[r][c] = ch.events.size();
  }
  return table;
}

std::size_t events_in_window(const ChannelLog& channel, double t0, double t1) {
  return static_cast<std::size_t>(std::count_if(
      channel.events.begin(), channel.events.end(),
      [&](const TriggerEvent& e) { return e.time >= t0 && e.time < t1; }));
}

BoundConstants error_bound_constants(const DirectedTopology& topology,
                                const std::vector<ControllerGains>& gains,
                                const Thresholds& thresholds,
                                const std::vector<GaussianNetwork>& networks,
                                const std::vector<std::vector<double>>& weight_caps) {
  const std::size_t n_agents = topology.size();
  const std::size_t n = networks.size();
  if (n == 0) throw MalformedInputError("error_bound_constants: no networks");
  if (gains.size() != n_agents || thresholds.state.size() != n_agents ||
      thresholds.filter.size() != n_agents) {
    throw MalformedInputError("error_bound_constants: gains and thresholds need one entry per agent");
  }
  if (weight_caps.size() != n_agents) {
    throw MalformedInputError("error_bound_constants: missing weight norm caps");
  }
  for (std::size_t i = 0; i < n_agents; ++i) {
    if (weight_caps[i].size() != n) {
      throw MalformedInputError("error_bound_constants: missing weight norm caps for agent " +
                                std::to_string(i + 1));
    }
    if (thresholds.state[i].size() != n || thresholds.filter[i].size() + 1 != n) {
      throw MalformedInputError("error_bound_constants: threshold shape mismatch");
    }
    gains[i].validate(n);
  }

  BoundConstants out;
  for (std::size_t i = 0; i < n_agents; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto& dx = thresholds.state[i];
    const auto& dalpha = thresholds.filter[i];
    const auto& g = gains[i];
    AgentBounds b;
    const double mu_i = topology.leader_gains(ii);
    double neighbor_term = 0.0;
    for (std::size_t j : topology.neighbors(i)) {
      neighbor_term += topology.adjacency(ii, static_cast<Eigen::Index>(j)) * thresholds.state[j][0];
    }
    b.delta_e = (topology.in_degree(i) + mu_i) * dx[0] + neighbor_term + mu_i * thresholds.leader;

    double input_sq = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      b.delta_z.push_back(k == 1 ? dx[0] : dx[k - 1] + dalpha[k - 2]);
      input_sq += dx[k - 1] * dx[k - 1];
      b.delta_phi.push_back(basis_deviation_bound(networks[k - 1], std::sqrt(input_sq)));
    }

    b.rho.assign(n, std::vector<double>(n, 0.0));
    b.tau.assign(n, 0.0);
    b.rho[0][0] = b.delta_phi[0];
    b.tau[0] = g.kappa1 * b.delta_e + (g.c[0] + 1.0) * b.delta_z[0] +
               b.delta_phi[0] * weight_caps[i][0];
    for (std::size_t k = 2; k <= n; ++k) {
      const double mu = g.mu_filter[k - 2];
      for (std::size_t q = 1; q < k; ++q) b.rho[k - 1][q - 1] = b.rho[k - 2][q - 1] / mu;
      b.rho[k - 1][k - 1] = b.delta_phi[k - 1];
      b.tau[k - 1] = (g.c[k - 1] + 1.0) * b.delta_z[k - 1] + b.delta_z[k - 2] +
                     b.tau[k - 2] / mu + dalpha[k - 2] / mu +
                     b.delta_phi[k - 1] * weight_caps[i][k - 1];
    }
    out.agents.push_back(std::move(b));
  }
  return out;
}

BoundConstants error_bound_constants(const Scenario& scenario) {
  const std::size_t n = scenario.plant.order;
  std::vector<GaussianNetwork> nets;
  for (std::size_t k = 1; k <= n; ++k) nets.push_back(scenario.basis.network(k));
  std::vector<double> caps(n, 0.0);
  if (scenario.plant.family == PlantFamily::kInSpan) {
    for (std::size_t k = 0; k < n; ++k) {
      const auto& w = scenario.plant.ideal_weights.at(k);
      caps[k] = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())).norm();
    }
  }
  return error_bound_constants(scenario.topology, scenario.gains, scenario.thresholds, nets,
                          std::vector<std::vector<double>>(scenario.agents(), caps));
}

std::string to_string(BoundCheck check) {
  switch (check) {
    case BoundCheck::kStateError:
      return "|z1 - z1_bar| <= dz1";
    case BoundCheck::kFilteredError:
      return "|zk - zk_bar| <= dxk + dalphakf";
    case BoundCheck::kVirtualControl:
      return "|alphak - alphak_bar| <= sum rho|W~| + tau";
    case BoundCheck::kConsensusError:
      return "|e - e_bar| <= de";
  }
  return "?";
}

std::size_t MonitorReport::count(BoundCheck check) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(), [&](const auto& v) { return v.check == check; }));
}

MonitorReport bound_monitor(const TrajectoryRecord& record, const BoundConstants& constants) {
  MonitorReport report;
  if (record.mode == ControlMode::kContinuous || record.channels.empty()) {
    report.note = "no channels: continuous-mode run, triggering bounds do not apply";
    return report;
  }
  if (constants.agents.size() != record.agents.size()) {
    throw MalformedInputError("bound_monitor: constants and record disagree on agent count");
  }
  const std::size_t n = record.order;
  for (const auto& a : record.agents) {
    if (a.z.size() != n || a.z_held.size() != n || a.alpha.size() != n ||
        a.alpha_held.size() != n || a.consensus_error.size() != record.samples()) {
      throw MalformedInputError("bound_monitor: record lacks side-by-side diagnostics");
    }
  }
  report.applicable = true;
  const bool virtual_checks = record.has_weight_errors();
  report.note = virtual_checks ? "structural and virtual-control bounds"
                               : "structural bounds only (no weight-error series)";

  for (std::size_t i = 0; i < record.agents.size(); ++i) {
    const auto& a = record.agents[i];
    const auto& b = constants.agents[i];
    for (std::size_t s = 0; s < record.samples(); ++s) {
      const auto check = [&](BoundCheck kind, std::size_t level, double dev, double bound,
                             std::size_t& counter) {
        ++counter;
        if (!within(dev, bound)) report.violations.push_back({kind, i + 1, level, s, dev, bound});
      };
      check(BoundCheck::kStateError, 1, std::abs(a.z[0][s] - a.z_held[0][s]), b.delta_z[0],
            report.checks_state);
      for (std::size_t k = 2; k <= n; ++k) {
        check(BoundCheck::kFilteredError, k, std::abs(a.z[k - 1][s] - a.z_held[k - 1][s]),
              b.delta_z[k - 1], report.checks_filtered);
      }
      check(BoundCheck::kConsensusError, 0,
            std::abs(a.consensus_error[s] - a.consensus_error_held[s]), b.delta_e,
            report.checks_consensus);
      if (virtual_checks) {
        for (std::size_t k = 1; k <= n; ++k) {
          double bound = b.tau[k - 1];
          for (std::size_t q = 1; q <= k; ++q) {
            bound += b.rho[k - 1][q - 1] * a.weight_error_norm[q - 1][s];
          }
          check(BoundCheck::kVirtualControl, k,
                std::abs(a.alpha[k - 1][s] - a.alpha_held[k - 1][s]), bound,
                report.checks_virtual);
        }
      }
    }
  }
  return report;
}

RunSummary summarize(const TrajectoryRecord& record) {
  if (record.samples() < 2) throw MalformedInputError("summarize: record too short");
  RunSummary s;
  s.mode = record.mode;
  s.step = record.step;
  s.horizon = record.time.back() - record.time.front();
  s.error_norm = mean_square_norm(record, s.horizon);
  const double tail_start = record.time.front() + 0.8 * s.horizon;
  for (const auto& eps : output_tracking_error(record)) {
    double tail = 0.0;
    double all = 0.0;
    for (std::size_t k = 0; k < eps.size(); ++k) {
      all = std::max(all, std::abs(eps[k]));
      if (record.time[k] >= tail_start) tail = std::max(tail, std::abs(eps[k]));
    }
    s.final_max_abs_error.push_back(tail);
    s.max_abs_error.push_back(all);
  }
  s.counts = trigger_count_table(record);
  for (const auto& ch : record.channels) {
    const auto st = inter_event_stats(ch.events);
    s.channels.push_back({ch.id, st.count, st.min_gap, st.mean_gap});
  }
  return s;
}

void write_summary_text(const RunSummary& s, std::ostream& os) {
  os << "mode: " << to_string(s.mode) << "\n"
     << "horizon: " << s.horizon << " s, step: " << s.step << " s\n"
     << std::setprecision(6) << "mean-square tracking error ||eps||_[0,T]: " << s.error_norm
     << "\n\n";
  os << "per-agent |eps|:\n";
  for (std::size_t i = 0; i < s.max_abs_error.size(); ++i) {
    os << "  agent " << i + 1 << ": max " << s.max_abs_error[i] << ", max over final 20% "
       << s.final_max_abs_error[i] << "\n";
  }
  os << "\ntriggering events:\n" << s.counts.format();
  if (!s.channels.empty()) {
    os << "\ninter-event gaps (s):\n";
    for (const auto& c : s.channels) {
      os << "  " << std::left << std::setw(16) << c.id.to_string() << std::right
         << " count " << std::setw(7) << c.count << "  min "
         << (c.min_gap ? std::to_string(*c.min_gap) : std::string("none")) << "  mean "
         << (c.mean_gap ? std::to_string(*c.mean_gap) : std::string("none")) << "\n";
    }
  }
}

void write_summary_csv(const RunSummary& s, std::ostream& os) {
  os << std::setprecision(17);
  os << "metric,subject,value\n";
  os << "error_norm,all," << s.error_norm << "\n";
  for (std::size_t i = 0; i < s.max_abs_error.size(); ++i) {
    os << "max_abs_error,agent" << i + 1 << "," << s.max_abs_error[i] << "\n";
    os << "final_max_abs_error,agent" << i + 1 << "," << s.final_max_abs_error[i] << "\n";
  }
  for (const auto& c : s.channels) {
    os << "event_count," << c.id.to_string() << "," << c.count << "\n";
    if (c.min_gap) os << "min_gap," << c.id.to_string() << "," << *c.min_gap << "\n";
    if (c.mean_gap) os << "mean_gap," << c.id.to_string() << "," << *c.mean_gap << "\n";
  }
}

bool same_except_thresholds(const Scenario& a, const Scenario& b) {
  const auto gains_equal = [](const ControllerGains& x, const ControllerGains& y) {
    return x.kappa1 == y.kappa1 && x.c == y.c && x.gamma_y0 == y.gamma_y0 &&
           x.sigma_y0 == y.sigma_y0 && x.sigma_w == y.sigma_w && x.gamma_w == y.gamma_w &&
           x.mu_filter == y.mu_filter;
  };
  if (a.gains.size() != b.gains.size()) return false;
  for (std::size_t i = 0; i < a.gains.size(); ++i) {
    if (!gains_equal(a.gains[i], b.gains[i])) return false;
  }
  return a.topology.adjacency == b.topology.adjacency &&
         a.topology.leader_gains == b.topology.leader_gains && a.plant == b.plant &&
         a.basis == b.basis && a.reference == b.reference && a.run == b.run;
}

ThresholdComparison compare_records(const TrajectoryRecord& first,
                                    const Thresholds& first_thresholds,
                                    const TrajectoryRecord& second,
                                    const Thresholds& second_thresholds) {
  ThresholdComparison cmp;
  cmp.first = summarize(first);
  cmp.second = summarize(second);
  cmp.first_thresholds = first_thresholds;
  cmp.second_thresholds = second_thresholds;

  int direction = 0;  // +1 all thresholds grew, -1 all shrank, 2 mixed
  const auto note_direction = [&](double a, double b) {
    const int d = sign_of(b - a);
    if (d == 0) return;
    if (direction == 0) direction = d;
    else if (direction != d) direction = 2;
  };
  for (std::size_t i = 0; i < first_thresholds.state.size(); ++i) {
    for (std::size_t k = 0; k < first_thresholds.state[i].size(); ++k) {
      note_direction(first_thresholds.state[i][k], second_thresholds.state[i][k]);
    }
    for (std::size_t k = 0; k < first_thresholds.filter[i].size(); ++k) {
      note_direction(first_thresholds.filter[i][k], second_thresholds.filter[i][k]);
    }
  }
  note_direction(first_thresholds.leader, second_thresholds.leader);

  for (const auto& ch : first.channels) {
    if (ch.id.kind != SignalKind::kState) continue;
    const auto c1 = cmp.first.counts.count(ch.id);
    const auto c2 = cmp.second.counts.count(ch.id);
    if (!c1 || !c2) continue;
    const double d1 = first_thresholds.state[ch.id.agent - 1][ch.id.level - 1];
    const double d2 = second_thresholds.state[ch.id.agent - 1][ch.id.level - 1];
    const int expected = -sign_of(d2 - d1);
    const int observed = sign_of(static_cast<double>(*c2) - static_cast<double>(*c1));
    if (expected != observed) {
      cmp.counts_follow_trend = false;
      cmp.deviations.push_back(ch.id.to_string() + ": " + std::to_string(*c1) + " -> " +
                               std::to_string(*c2) + " events");
    }
  }
  const auto l1 = cmp.first.counts.count(SignalId::leader());
  const auto l2 = cmp.second.counts.count(SignalId::leader());
  if (first_thresholds.leader == second_thresholds.leader && l1 != l2) {
    cmp.leader_unchanged = false;
    cmp.deviations.push_back("leader count changed with an unchanged leader threshold");
  }
  if (direction == 0) {
    cmp.norm_follows_trend = cmp.first.error_norm == cmp.second.error_norm;
  } else if (direction != 2) {
    const int observed = sign_of(cmp.second.error_norm - cmp.first.error_norm);
    cmp.norm_follows_trend = observed == 0 || observed == direction;
  }
  if (!cmp.norm_follows_trend) {
    std::ostringstream os;
    os << std::setprecision(6) << "error norm " << cmp.first.error_norm << " -> "
       << cmp.second.error_norm;
    cmp.deviations.push_back(os.str());
  }
  return cmp;
}

ThresholdComparison compare_thresholds(const Scenario& first, const Scenario& second) {
  if (!same_except_thresholds(first, second)) {
    throw ValidationError("compare_thresholds: scenarios differ beyond their thresholds");
  }
  if (first.run.mode != ControlMode::kTriggered) {
    throw ValidationError("compare_thresholds: scenarios must run in triggered mode");
  }
  auto a = std::async(std::launch::async, [&] { return run(first); });
  TrajectoryRecord b = run(second);
  return compare_records(a.get(), first.thresholds, b, second.thresholds);
}

void write_comparison_text(const ThresholdComparison& cmp, std::ostream& os) {
  const auto describe = [](const Thresholds& t) {
    std::ostringstream d;
    d << "state " << (t.state.empty() || t.state[0].empty() ? 0.0 : t.state[0][0]);
    if (!t.filter.empty() && !t.filter[0].empty()) d << ", filter " << t.filter[0][0];
    d << ", leader " << t.leader;
    return d.str();
  };
  os << "run A (" << describe(cmp.first_thresholds) << ")\n" << cmp.first.counts.format()
     << "||eps||_[0,T] = " << std::setprecision(6) << cmp.first.error_norm << "\n\n";
  os << "run B (" << describe(cmp.second_thresholds) << ")\n" << cmp.second.counts.format()
     << "||eps||_[0,T] = " << cmp.second.error_norm << "\n\n";
  os << "state event counts follow thresholds: " << (cmp.counts_follow_trend ? "yes" : "no") << "\n"
     << "leader count unchanged: " << (cmp.leader_unchanged ? "yes" : "no") << "\n"
     << "error norm follows thresholds: " << (cmp.norm_follows_trend ? "yes" : "no") << "\n"
     << "expected trend held: " << (cmp.trend_held() ? "yes" : "no") << "\n";
  for (const auto& d : cmp.deviations) os << "  deviation: " << d << "\n";
}

}  // namespace neurotrig
