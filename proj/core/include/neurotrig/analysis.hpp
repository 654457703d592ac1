#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "neurotrig/sim.hpp"

namespace neurotrig {

/// epsilon_i(t) = x_{i,1}(t) - y0(t), one series per agent.
std::vector<std::vector<double>> output_tracking_error(const TrajectoryRecord& record);

/// sqrt( (1/T) int_0^T sum_i eps_i(t)^2 dt ) by the trapezoidal rule on the
/// sample grid; a horizon between samples interpolates eps linearly.
double mean_square_norm(std::span<const double> time,
                        const std::vector<std::vector<double>>& errors, double horizon);
double mean_square_norm(const TrajectoryRecord& record, double horizon);

/// Event counts shaped like a table: one row per broadcasting entity (agents
/// then the leader), one column per signal kind.
struct CountTable {
  std::vector<std::string> columns;          // "x1", "x2", "alpha2f", "y0"
  std::vector<std::string> rows;             // "Agent 1", ..., "Leader 0"
  std::vector<std::vector<std::optional<std::size_t>>> counts;  // [row][column]

  bool empty() const { return rows.empty(); }
  std::optional<std::size_t> count(const SignalId& id) const;
  std::string format() const;
};

CountTable trigger_count_table(const TrajectoryRecord& record);

/// Events with time in [t0, t1).
std::size_t events_in_window(const ChannelLog& channel, double t0, double t1);

/// Triggering-effect constants of one agent.
struct AgentBounds {
  std::vector<double> delta_z;           // level 1..n
  double delta_e = 0.0;
  std::vector<double> delta_phi;         // level 1..n
  std::vector<std::vector<double>> rho;  // rho[k-1][q-1], q <= k
  std::vector<double> tau;               // level 1..n
};

struct BoundConstants {
  std::vector<AgentBounds> agents;
};

/// Chains the triggering thresholds through the control law:
///   de_i    = (d_i + mu_i) dx_1^i + sum_j a_ij dx_1^j + mu_i dy0
///   dz_1    = dx_1,   dz_k = dx_k + dalpha_kf
///   dphi_k  = basis_deviation_bound(net_k, |(dx_1..dx_k)|)
///   rho_11  = dphi_1, tau_1 = kappa1 de + (c_1 + 1) dz_1 + dphi_1 |W_1|
///   rho_kq  = rho_{k-1,q} / mu_k,  rho_kk = dphi_k
///   tau_k   = (c_k + 1) dz_k + dz_{k-1} + (tau_{k-1} + dalpha_kf) / mu_k + dphi_k |W_k|
/// weight_caps[i][k-1] bounds |W_{i,k}|. Thresholds may be zero here.
BoundConstants error_bound_constants(const DirectedTopology& topology,
                                const std::vector<ControllerGains>& gains,
                                const Thresholds& thresholds,
                                const std::vector<GaussianNetwork>& networks,
                                const std::vector<std::vector<double>>& weight_caps);

/// Same, taking caps from the in-span ideal weights (zero caps otherwise).
BoundConstants error_bound_constants(const Scenario& scenario);

enum class BoundCheck { kStateError, kFilteredError, kVirtualControl, kConsensusError };
std::string to_string(BoundCheck check);

struct BoundViolation {
  BoundCheck check;
  std::size_t agent = 0;  // 1-based
  std::size_t level = 0;
  std::size_t step = 0;
  double deviation = 0.0;
  double bound = 0.0;
};

struct MonitorReport {
  bool applicable = false;
  std::string note;
  std::size_t checks_state = 0;      // |z_1 - z1_bar| <= dz_1
  std::size_t checks_filtered = 0;   // |z_k - zk_bar| <= dz_k, k >= 2
  std::size_t checks_consensus = 0;  // |e - e_bar| <= de
  std::size_t checks_virtual = 0;    // |alpha_k - alphak_bar| <= sum rho |W~| + tau
  std::vector<BoundViolation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t count(BoundCheck check) const;
};

/// Checks every recorded step against the constants. Virtual-control bounds
/// need weight-error series (in-span runs) and are skipped otherwise.
MonitorReport bound_monitor(const TrajectoryRecord& record, const BoundConstants& constants);

struct ChannelSummary {
  SignalId id;
  std::size_t count = 0;
  std::optional<double> min_gap;
  std::optional<double> mean_gap;
};

struct RunSummary {
  ControlMode mode = ControlMode::kTriggered;
  double horizon = 0.0;
  double step = 0.0;
  double error_norm = 0.0;
  std::vector<double> final_max_abs_error;  // per agent, last 20% of the horizon
  std::vector<double> max_abs_error;        // per agent, whole run
  CountTable counts;
  std::vector<ChannelSummary> channels;
};

RunSummary summarize(const TrajectoryRecord& record);
void write_summary_text(const RunSummary& summary, std::ostream& os);
void write_summary_csv(const RunSummary& summary, std::ostream& os);

/// Two runs that differ only in triggering thresholds.
struct ThresholdComparison {
  RunSummary first;
  RunSummary second;
  Thresholds first_thresholds;
  Thresholds second_thresholds;
  bool counts_follow_trend = true;  // every state channel moves opposite to its threshold
  bool leader_unchanged = true;
  bool norm_follows_trend = true;   // error norm moves with the thresholds
  std::vector<std::string> deviations;

  bool trend_held() const { return counts_follow_trend && leader_unchanged && norm_follows_trend; }
};

/// True when the scenarios agree on everything except thresholds.
bool same_except_thresholds(const Scenario& a, const Scenario& b);

/// Runs both scenarios (concurrently) and compares. Throws ValidationError
/// when they differ beyond thresholds or are not in triggered mode.
ThresholdComparison compare_thresholds(const Scenario& first, const Scenario& second);
ThresholdComparison compare_records(const TrajectoryRecord& first, const Thresholds& first_thresholds,
                                    const TrajectoryRecord& second,
                                    const Thresholds& second_thresholds);
void write_comparison_text(const ThresholdComparison& cmp, std::ostream& os);

}  // namespace neurotrig
