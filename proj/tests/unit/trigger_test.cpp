#include <random>

#include <gtest/gtest.h>

#include "neurotrig/errors.hpp"
#include "neurotrig/trigger.hpp"

using namespace neurotrig;

TEST(Trigger, InitialBroadcast) {
  TriggerChannel ch(SignalId::state(1, 1), 0.01, 1.0, 0.0);
  EXPECT_EQ(ch.held(), 1.0);
  ASSERT_EQ(ch.events().size(), 1u);
  EXPECT_EQ(ch.events()[0].time, 0.0);
  EXPECT_EQ(ch.events()[0].value, 1.0);
  EXPECT_EQ(TriggerChannel(SignalId::leader(), 0.005, 0.0).held(), 0.0);
  EXPECT_THROW(TriggerChannel(SignalId::state(1, 1), 0.0, 1.0), MalformedInputError);
  EXPECT_THROW(TriggerChannel(SignalId::state(1, 1), -1.0, 1.0), MalformedInputError);
}

TEST(Trigger, StrictCrossing) {
  TriggerChannel ch(SignalId::state(1, 1), 0.01, 1.0);
  auto r = ch.process_sample(0.001, 1.0);
  EXPECT_FALSE(r.fired);
  r = ch.process_sample(0.002, 1.010);
  EXPECT_FALSE(r.fired);
  EXPECT_EQ(r.held, 1.0);
  r = ch.process_sample(0.003, 1.011);
  EXPECT_TRUE(r.fired);
  EXPECT_EQ(r.held, 1.011);
  EXPECT_EQ(ch.last_event_time(), 0.003);
  EXPECT_THROW(ch.process_sample(0.002, 2.0), MalformedInputError);
}

TEST(Trigger, DeviationInvariantAndMonotoneLog) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 0.004);
  TriggerChannel ch(SignalId::state(2, 2), 0.01, 0.0);
  double v = 0.0;
  for (int s = 1; s <= 20000; ++s) {
    v += n(rng);
    const auto r = ch.process_sample(s * 1e-3, v);
    EXPECT_LE(std::abs(v - r.held), 0.01 + 1e-15);
  }
  for (std::size_t k = 1; k < ch.events().size(); ++k) {
    EXPECT_LT(ch.events()[k - 1].time, ch.events()[k].time);
  }
}

TEST(Trigger, CoarseChannelSilentWhenBothWithinThresholds) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 0.01);
  TriggerChannel fine(SignalId::state(1, 1), 0.01, 0.0);
  TriggerChannel coarse(SignalId::state(1, 1), 0.05, 0.0);
  double v = 0.0;
  for (int s = 1; s <= 20000; ++s) {
    v += n(rng);
    const double fine_dev = std::abs(v - fine.held());
    const double coarse_dev = std::abs(v - coarse.held());
    fine.process_sample(s * 1e-3, v);
    const auto r = coarse.process_sample(s * 1e-3, v);
    if (fine_dev <= 0.01 && coarse_dev <= 0.05) EXPECT_FALSE(r.fired);
  }
}

TEST(Trigger, InterEventStats) {
  const auto stats = inter_event_stats(std::vector<TriggerEvent>{{0, 0}, {1, 0}, {3, 0}});
  EXPECT_EQ(stats.count, 3u);
  EXPECT_EQ(*stats.min_gap, 1.0);
  EXPECT_EQ(*stats.mean_gap, 1.5);
  const auto single = inter_event_stats(std::vector<TriggerEvent>{{0, 0}});
  EXPECT_EQ(single.count, 1u);
  EXPECT_FALSE(single.min_gap.has_value());
  EXPECT_FALSE(single.mean_gap.has_value());
  EXPECT_THROW(inter_event_stats(std::vector<TriggerEvent>{}), MalformedInputError);

  TriggerChannel ch(SignalId::state(1, 1), 0.01, 0.0);
  for (int s = 1; s <= 10; ++s) ch.process_sample(s * 0.5, s * 1.0);
  const auto uniform = inter_event_stats(ch);
  EXPECT_EQ(uniform.count, 11u);
  EXPECT_DOUBLE_EQ(*uniform.min_gap, 0.5);
  EXPECT_DOUBLE_EQ(*uniform.mean_gap, 0.5);
}

TEST(Trigger, SignalIdRoundTrip) {
  for (const auto& id : {SignalId::state(2, 1), SignalId::filter_output(3, 2), SignalId::leader()}) {
    EXPECT_EQ(SignalId::parse(id.to_string()), id);
  }
  EXPECT_EQ(SignalId::state(2, 1).to_string(), "agent2.x1");
  EXPECT_EQ(SignalId::filter_output(4, 2).to_string(), "agent4.alpha2f");
  EXPECT_EQ(SignalId::leader().to_string(), "leader.y0");
  EXPECT_THROW(SignalId::parse("agent.x"), MalformedInputError);
}
