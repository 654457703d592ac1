#include "neurotrig/trigger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "neurotrig/errors.hpp"

namespace neurotrig {

std::string SignalId::to_string() const {
  switch (kind) {
    case SignalKind::kState:
      return "agent" + std::to_string(agent) + ".x" + std::to_string(level);
    case SignalKind::kFilterOutput:
      return "agent" + std::to_string(agent) + ".alpha" + std::to_string(level) + "f";
    case SignalKind::kLeaderOutput:
      return "leader.y0";
  }
  return "?";
}

SignalId SignalId::parse(const std::string& text) {
  if (text == "leader.y0") return leader();
  const auto fail = [&]() -> SignalId { throw MalformedInputError("bad signal id '" + text + "'"); };
  if (text.rfind("agent", 0) != 0) return fail();
  const auto dot = text.find('.');
  if (dot == std::string::npos || dot == 5) return fail();
  std::size_t agent = 0;
  std::size_t level = 0;
  try {
    agent = std::stoul(text.substr(5, dot - 5));
    const std::string tail = text.substr(dot + 1);
    if (tail.size() > 1 && tail[0] == 'x') {
      level = std::stoul(tail.substr(1));
      return state(agent, level);
    }
    if (tail.rfind("alpha", 0) == 0 && tail.size() > 6 && tail.back() == 'f') {
      level = std::stoul(tail.substr(5, tail.size() - 6));
      return filter_output(agent, level);
    }
  } catch (const std::logic_error&) {
  }
  return fail();
}

TriggerChannel::TriggerChannel(SignalId id, double threshold, double initial_value,
                               double start_time)
    : id_(id), threshold_(threshold), held_(initial_value), last_sample_time_(start_time) {
  if (!(threshold > 0.0)) {
    throw MalformedInputError("trigger channel " + id_.to_string() +
                              ": threshold must be positive");
  }
  events_.push_back({start_time, initial_value});
}

SampleResult TriggerChannel::process_sample(double time, double value) {
  if (time < last_sample_time_) {
    throw MalformedInputError("trigger channel " + id_.to_string() + ": time went backwards");
  }
  last_sample_time_ = time;
  // Deviations equal to the threshold up to subtraction round-off do not fire.
  const double slack = 2.0 * std::numeric_limits<double>::epsilon() *
                       std::max(std::abs(value), std::abs(held_));
  if (std::abs(value - held_) > threshold_ + slack) {
    held_ = value;
    // Two firings at the same instant collapse into one log entry.
    if (time > events_.back().time) {
      events_.push_back({time, value});
    } else {
      events_.back().value = value;
    }
    return {held_, true};
  }
  return {held_, false};
}

InterEventStats inter_event_stats(const std::vector<TriggerEvent>& events) {
  if (events.empty()) throw MalformedInputError("inter_event_stats: empty event log");
  InterEventStats stats;
  stats.count = events.size();
  if (events.size() < 2) return stats;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < events.size(); ++k) {
    min_gap = std::min(min_gap, events[k].time - events[k - 1].time);
  }
  stats.min_gap = min_gap;
  stats.mean_gap = (events.back().time - events.front().time) /
                   static_cast<double>(events.size() - 1);
  return stats;
}

}  // namespace neurotrig
