#include <sstream>

#include <gtest/gtest.h>

#include "neurotrig/analysis.hpp"
#include "neurotrig/errors.hpp"
#include "neurotrig/record_io.hpp"
#include "neurotrig/scenario_io.hpp"

using namespace neurotrig;

namespace {

std::string parse_error(const std::string& yaml) {
  try {
    parse_scenario(yaml, "test.yaml");
  } catch (const MalformedInputError& e) {
    return e.what();
  }
  return "";
}

bool same_scenario(const Scenario& a, const Scenario& b) {
  return same_except_thresholds(a, b) && a.thresholds == b.thresholds && a.run == b.run;
}

}  // namespace

TEST(ScenarioIo, EmptyDocumentIsTheDemo) {
  EXPECT_TRUE(same_scenario(parse_scenario(""), Scenario::demo()));
}

TEST(ScenarioIo, ShippedFilesParse) {
  const Scenario demo = load_scenario(std::string(NEUROTRIG_SCENARIO_DIR) + "/demo.yaml");
  EXPECT_TRUE(same_scenario(demo, Scenario::demo()));
  const Scenario span = load_scenario(std::string(NEUROTRIG_SCENARIO_DIR) + "/in_span.yaml");
  EXPECT_TRUE(same_scenario(span, Scenario::in_span_demo(7)));
}

TEST(ScenarioIo, OverridesAndPerAgentLists) {
  const Scenario s = parse_scenario(R"(
gains:
  - {kappa1: 0.7}
  - {c: [4, 4]}
  - {}
  - {mu_filter: [0.1]}
thresholds:
  state: [[0.01, 0.02], [0.01, 0.01], [0.03, 0.01], [0.01, 0.01]]
  leader: 0.002
run:
  horizon: 12.5
  mode: continuous
)");
  EXPECT_EQ(s.gains[0].kappa1, 0.7);
  EXPECT_EQ(s.gains[1].c, (std::vector<double>{4, 4}));
  EXPECT_EQ(s.gains[3].mu_filter, (std::vector<double>{0.1}));
  EXPECT_EQ(s.thresholds.state[2][0], 0.03);
  EXPECT_EQ(s.thresholds.filter[0][0], 0.02);
  EXPECT_EQ(s.thresholds.leader, 0.002);
  EXPECT_EQ(s.run.horizon, 12.5);
  EXPECT_EQ(s.run.mode, ControlMode::kContinuous);
}

TEST(ScenarioIo, ErrorsNameLineAndKey) {
  std::string msg = parse_error("run:\n  horizon: 10\n  stepsize: 0.01\n");
  EXPECT_NE(msg.find("test.yaml:3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("run.stepsize"), std::string::npos) << msg;

  msg = parse_error("gains:\n  kappa1: fast\n");
  EXPECT_NE(msg.find(":2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("gains.kappa1"), std::string::npos) << msg;

  msg = parse_error("topology:\n  adjacency: [[0, 1], [1]]\n  leader_gains: [1, 0]\n");
  EXPECT_NE(msg.find("topology.adjacency[1]"), std::string::npos) << msg;

  msg = parse_error("run: {mode: sometimes}\n");
  EXPECT_NE(msg.find("run.mode"), std::string::npos) << msg;

  msg = parse_error("plant: [1, 2\n");
  EXPECT_NE(msg.find("syntax"), std::string::npos) << msg;
}

TEST(ScenarioIo, WriterRoundTrip) {
  for (const Scenario& s : {Scenario::demo(), Scenario::in_span_demo(3)}) {
    std::ostringstream os;
    write_scenario(s, os);
    const Scenario back = parse_scenario(os.str());
    EXPECT_TRUE(same_scenario(back, s)) << os.str();
    EXPECT_EQ(back.plant.ideal_weights, s.plant.ideal_weights);
  }
}

TEST(ScenarioIo, ApplyParameter) {
  Scenario s = Scenario::demo();
  apply_parameter(s, "thresholds.state", 0.1);
  apply_parameter(s, "gains.mu_filter", 0.3);
  EXPECT_EQ(s.thresholds.state[3][1], 0.1);
  EXPECT_EQ(s.gains[2].mu_filter[0], 0.3);
  EXPECT_THROW(apply_parameter(s, "gains.nope", 1.0), MalformedInputError);
}

TEST(RecordIo, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 0.0}) {
    std::istringstream is(format_double(v));
    EXPECT_EQ(std::stod(is.str()), v);
  }
}

TEST(RecordIo, CsvRoundTripReproducesMetrics) {
  for (Scenario s : {Scenario::demo(), Scenario::in_span_demo()}) {
    s.run.horizon = 5.0;
    const auto rec = run(s);
    std::stringstream traj, events;
    write_trajectory_csv(rec, traj);
    write_events_csv(rec.channels, events);
    TrajectoryRecord back = read_trajectory_csv(traj);
    back.channels = read_events_csv(events);
    back.mode = ControlMode::kTriggered;
    back.step = rec.step;

    EXPECT_EQ(back.time, rec.time);
    EXPECT_EQ(back.has_weight_errors(), rec.has_weight_errors());
    EXPECT_EQ(mean_square_norm(back, 5.0), mean_square_norm(rec, 5.0));
    EXPECT_EQ(mean_square_norm(back, 3.3), mean_square_norm(rec, 3.3));
    EXPECT_EQ(output_tracking_error(back), output_tracking_error(rec));
    EXPECT_EQ(trigger_count_table(back).counts, trigger_count_table(rec).counts);

    const auto a = summarize(rec), b = summarize(back);
    EXPECT_EQ(a.error_norm, b.error_norm);
    EXPECT_EQ(a.final_max_abs_error, b.final_max_abs_error);
    for (std::size_t c = 0; c < a.channels.size(); ++c) EXPECT_EQ(a.channels[c].min_gap, b.channels[c].min_gap);

    const auto constants = error_bound_constants(s);
    const auto m1 = bound_monitor(rec, constants), m2 = bound_monitor(back, constants);
    EXPECT_EQ(m1.violations.size(), m2.violations.size());
    EXPECT_EQ(m1.checks_virtual, m2.checks_virtual);
  }
}

TEST(RecordIo, StrideKeepsLastSample) {
  Scenario s = Scenario::demo();
  s.run.horizon = 0.105;
  const auto rec = run(s);
  std::stringstream traj;
  write_trajectory_csv(rec, traj, 10);
  const auto back = read_trajectory_csv(traj);
  EXPECT_EQ(back.samples(), 12u);
  EXPECT_EQ(back.time.back(), rec.time.back());
  EXPECT_DOUBLE_EQ(back.step, 0.01);
}

TEST(RecordIo, MalformedFilesRejected) {
  std::istringstream empty("");
  EXPECT_THROW(read_trajectory_csv(empty), MalformedInputError);
  std::istringstream bad_events("signal_id,event_index,time,value\nagent1.x1,1,0,0\n");
  EXPECT_THROW(read_events_csv(bad_events), MalformedInputError);
  std::istringstream bad_number("signal_id,event_index,time,value\nagent1.x1,0,zero,0\n");
  EXPECT_THROW(read_events_csv(bad_number), MalformedInputError);
}

TEST(RecordIo, TrajectoryHeader) {
  Scenario s = Scenario::demo();
  s.run.horizon = 0.01;
  const auto cols = trajectory_columns(run(s));
  EXPECT_EQ(cols[0], "t");
  EXPECT_EQ(cols[3], "x_1_1");
  EXPECT_NE(std::find(cols.begin(), cols.end(), "alphah_4_2"), cols.end());
  EXPECT_EQ(std::find(cols.begin(), cols.end(), "wtilde_1_1"), cols.end());
}
