#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace neurotrig {

enum class SignalKind { kState, kFilterOutput, kLeaderOutput };

/// Which broadcast a channel carries. `agent` is 1-based; 0 is the leader.
/// `level` is the backstepping level k (state x_k or filter output alpha_kf).
struct SignalId {
  std::size_t agent = 0;
  SignalKind kind = SignalKind::kState;
  std::size_t level = 1;

  static SignalId state(std::size_t agent, std::size_t level) {
    return {agent, SignalKind::kState, level};
  }
  static SignalId filter_output(std::size_t agent, std::size_t level) {
    return {agent, SignalKind::kFilterOutput, level};
  }
  static SignalId leader() { return {0, SignalKind::kLeaderOutput, 0}; }

  /// "agent2.x1", "agent2.alpha2f", "leader.y0".
  std::string to_string() const;
  static SignalId parse(const std::string& text);

  friend bool operator==(const SignalId&, const SignalId&) = default;
};

struct TriggerEvent {
  double time = 0.0;
  double value = 0.0;
};

struct SampleResult {
  double held = 0.0;
  bool fired = false;
};

struct InterEventStats {
  std::size_t count = 0;
  std::optional<double> min_gap;
  std::optional<double> mean_gap;
};

/// Send-on-delta channel: the held value is rebroadcast only when the sample
/// deviates from it by strictly more than the threshold. Deviations within
/// two ulps of the threshold count as equal, so |sample - held| <= threshold
/// holds up to that rounding.
class TriggerChannel {
 public:
  /// Broadcasts `initial_value` at `start_time`. Threshold must be positive.
  TriggerChannel(SignalId id, double threshold, double initial_value, double start_time = 0.0);

  SampleResult process_sample(double time, double value);

  const SignalId& id() const { return id_; }
  double threshold() const { return threshold_; }
  double held() const { return held_; }
  double last_event_time() const { return events_.back().time; }
  const std::vector<TriggerEvent>& events() const { return events_; }

 private:
  SignalId id_;
  double threshold_;
  double held_;
  double last_sample_time_;
  std::vector<TriggerEvent> events_;
};

/// Throws MalformedInputError on an empty log.
InterEventStats inter_event_stats(const std::vector<TriggerEvent>& events);
inline InterEventStats inter_event_stats(const TriggerChannel& channel) {
  return inter_event_stats(channel.events());
}

/// Event log of one channel, detached from the live channel state.
struct ChannelLog {
  SignalId id;
  double threshold = 0.0;
  std::vector<TriggerEvent> events;
};

}  // namespace neurotrig
