#include <cmath>

#include <gtest/gtest.h>

#include "neurotrig/errors.hpp"
#include "neurotrig/sim.hpp"

using namespace neurotrig;

namespace {

Scenario short_demo(double horizon, ControlMode mode = ControlMode::kTriggered) {
  Scenario s = Scenario::demo();
  s.run.horizon = horizon;
  s.run.mode = mode;
  return s;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b, std::size_t stride_b,
                std::size_t from = 0) {
  double worst = 0.0;
  for (std::size_t s = from; s < a.size(); ++s) worst = std::max(worst, std::abs(a[s] - b[s * stride_b]));
  return worst;
}

}  // namespace

TEST(Reference, Examples) {
  const auto r0 = reference_signal(0.0);
  EXPECT_EQ(r0.value, 0.0);
  EXPECT_DOUBLE_EQ(r0.rate, 0.075);
  EXPECT_NEAR(reference_signal(10 * M_PI).value, 0.5, 1e-12);
  double sup = 0.0;
  for (int k = 0; k <= 2'000'000; ++k) sup = std::max(sup, std::abs(reference_signal(k * 1e-4).rate));
  EXPECT_LE(sup, 0.075 + 1e-15);
  EXPECT_NEAR(sup, 0.075, 1e-12);
}

TEST(Scenario, DemoValidatesWithoutWarnings) {
  const Scenario s = Scenario::demo();
  EXPECT_NO_THROW(s.validate());
  EXPECT_TRUE(s.warnings().empty());
  EXPECT_EQ(s.steps(), 100000u);
  EXPECT_NO_THROW(Scenario::in_span_demo().validate());
}

TEST(Scenario, RejectsInvalidSettings) {
  Scenario s = Scenario::demo();
  s.topology.leader_gains.setZero();
  try {
    s.validate();
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("Assumption 2"), std::string::npos);
  }
  s = Scenario::demo();
  s.run.step = 0.0;
  EXPECT_THROW(s.validate(), ValidationError);
  s = Scenario::demo();
  s.thresholds.state[2][1] = 0.0;
  EXPECT_THROW(s.validate(), ValidationError);
  s = Scenario::demo();
  s.plant.initial_states.pop_back();
  EXPECT_THROW(s.validate(), ValidationError);
  s = Scenario::in_span_demo();
  s.basis.include_leader_estimate = true;
  EXPECT_THROW(s.validate(), ValidationError);
}

TEST(Scenario, WarnsOnSlowFilters) {
  Scenario s = Scenario::demo();
  s.gains[1].mu_filter[0] = 1.5;
  ASSERT_EQ(s.warnings().size(), 1u);
  EXPECT_NE(s.warnings()[0].find("agent 2"), std::string::npos);
}

TEST(Sim, RecordShapeAndInitialValues) {
  const auto rec = run(short_demo(0.5));
  EXPECT_EQ(rec.samples(), 501u);
  ASSERT_EQ(rec.agents.size(), 4u);
  EXPECT_EQ(rec.time.back(), 0.5);
  for (const auto& a : rec.agents) {
    EXPECT_EQ(a.x[0].front(), 1.0);
    EXPECT_EQ(a.x[1].front(), 0.0);
    EXPECT_EQ(a.tracking_error.front(), 1.0);
    EXPECT_EQ(a.leader_estimate.front(), 0.0);
    EXPECT_EQ(a.filter[0].front(), a.alpha_held[0].front());
    EXPECT_EQ(a.control.front(), a.alpha_held[1].front());
  }
  EXPECT_EQ(rec.channels.size(), 1u + 4u * 3u);
  EXPECT_FALSE(rec.has_weight_errors());
}

TEST(Sim, Deterministic) {
  const auto a = run(short_demo(5.0));
  const auto b = run(short_demo(5.0));
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.agents[i].x, b.agents[i].x);
    EXPECT_EQ(a.agents[i].control, b.agents[i].control);
    EXPECT_EQ(a.agents[i].leader_estimate, b.agents[i].leader_estimate);
  }
  ASSERT_EQ(a.channels.size(), b.channels.size());
  for (std::size_t c = 0; c < a.channels.size(); ++c) {
    ASSERT_EQ(a.channels[c].events.size(), b.channels[c].events.size());
    for (std::size_t e = 0; e < a.channels[c].events.size(); ++e) {
      EXPECT_EQ(a.channels[c].events[e].time, b.channels[c].events[e].time);
      EXPECT_EQ(a.channels[c].events[e].value, b.channels[c].events[e].value);
    }
  }
}

TEST(Sim, DegenerateEquilibriumStaysAtRest) {
  Scenario s = Scenario::demo();
  s.plant.family = PlantFamily::kIntegrator;
  s.plant.initial_states.assign(4, {0.0, 0.0});
  s.reference = ReferenceSignal::constant(0.0);
  ControllerGains g;
  g.kappa1 = 1e-6;
  g.c = {1e-6, 1e-6};
  g.gamma_y0 = 1e-6;
  g.sigma_y0 = 1e-6;
  g.sigma_w = {1e-6, 1e-6};
  g.gamma_w = {1e-6, 1e-6};
  g.mu_filter = {0.2};
  s.gains.assign(4, g);
  s.run.horizon = 2.0;
  for (const auto mode : {ControlMode::kContinuous, ControlMode::kTriggered}) {
    s.run.mode = mode;
    const auto rec = run(s);
    for (const auto& a : rec.agents) {
      for (std::size_t k = 0; k < 2; ++k) {
        for (double v : a.z[k]) ASSERT_EQ(v, 0.0);
        for (double v : a.x[k]) ASSERT_EQ(v, 0.0);
      }
      for (double v : a.tracking_error) ASSERT_EQ(v, 0.0);
      for (double v : a.control) ASSERT_EQ(v, 0.0);
    }
  }
}

// Equality with the threshold is decided up to two ulps of the signal.
constexpr double kRoundOff = 1e-14;

TEST(Sim, TriggerDeviationInvariant) {
  const Scenario s = short_demo(20.0);
  const auto rec = run(s);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& a = rec.agents[i];
    for (std::size_t step = 0; step < rec.samples(); ++step) {
      for (std::size_t k = 0; k < 2; ++k) {
        ASSERT_LE(std::abs(a.x[k][step] - a.x_held[k][step]), s.thresholds.state[i][k] + kRoundOff);
      }
      ASSERT_LE(std::abs(a.filter[0][step] - a.filter_held[0][step]), s.thresholds.filter[i][0] + kRoundOff);
    }
  }
  for (std::size_t step = 0; step < rec.samples(); ++step) {
    ASSERT_LE(std::abs(rec.reference[step] - rec.reference_held[step]), s.thresholds.leader + kRoundOff);
  }
}

TEST(Sim, EventGapsAtLeastOneStep) {
  const Scenario s = short_demo(20.0);
  const auto rec = run(s);
  for (const auto& ch : rec.channels) {
    for (std::size_t e = 1; e < ch.events.size(); ++e) {
      ASSERT_GE(ch.events[e].time - ch.events[e - 1].time, s.run.step * (1.0 - 1e-9)) << ch.id.to_string();
    }
  }
}

TEST(Sim, ContinuousModeHasNoChannels) {
  const auto rec = run(short_demo(1.0, ControlMode::kContinuous));
  EXPECT_TRUE(rec.channels.empty());
  for (const auto& a : rec.agents) {
    EXPECT_EQ(a.x, a.x_held);
    EXPECT_EQ(a.z, a.z_held);
    EXPECT_EQ(a.consensus_error, a.consensus_error_held);
  }
}

TEST(Sim, DivergenceNamesTimeAndSignal) {
  Scenario s = short_demo(5.0, ControlMode::kContinuous);
  for (auto& g : s.gains) g.c = {1e7, 1e7};
  s.run.step = 0.01;
  try {
    run(s);
    FAIL() << "expected DivergenceError";
  } catch (const DivergenceError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("t = "), std::string::npos) << what;
    EXPECT_NE(what.find("agent"), std::string::npos) << what;
    EXPECT_LT(e.step(), 500u);
  }
}

// Control, filter drive and broadcasts are held over each step, so the
// scheme converges at first order in h. The transient of the first second
// dominates the difference; afterwards halving h changes x_1 by < 1e-4.
TEST(Sim, StepHalvingConvergence) {
  Scenario coarse = short_demo(100.0, ControlMode::kContinuous);
  Scenario fine = coarse;
  fine.run.step = coarse.run.step / 2;
  Scenario finest = coarse;
  finest.run.step = coarse.run.step / 4;
  finest.run.horizon = 10.0;

  const auto a = run(coarse);
  const auto b = run(fine);
  double whole = 0.0, settled = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    whole = std::max(whole, sup_diff(a.agents[i].x[0], b.agents[i].x[0], 2));
    settled = std::max(settled, sup_diff(a.agents[i].x[0], b.agents[i].x[0], 2, 5000));
  }
  EXPECT_LT(settled, 1e-4);
  EXPECT_LT(whole, 5e-3);

  const auto c = run(finest);
  double d_ab = 0.0, d_bc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const std::vector<double> a10(a.agents[i].x[0].begin(), a.agents[i].x[0].begin() + 10001);
    const std::vector<double> b10(b.agents[i].x[0].begin(), b.agents[i].x[0].begin() + 20001);
    d_ab = std::max(d_ab, sup_diff(a10, b10, 2));
    d_bc = std::max(d_bc, sup_diff(b10, c.agents[i].x[0], 2));
  }
  const double order = std::log2(d_ab / d_bc);
  EXPECT_GT(order, 0.8);
  EXPECT_LT(order, 1.2);
}

TEST(Sim, InSpanRecordsWeightErrors) {
  Scenario s = Scenario::in_span_demo();
  s.run.horizon = 1.0;
  const auto rec = run(s);
  ASSERT_TRUE(rec.has_weight_errors());
  const auto w = sample_ideal_weights(2, 9, 7, 0.5);
  for (std::size_t k = 0; k < 2; ++k) {
    double norm = 0.0;
    for (double v : w[k]) norm += v * v;
    EXPECT_NEAR(rec.agents[0].weight_error_norm[k].front(), std::sqrt(norm), 1e-14);
  }
}
