#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "handoff/time.hpp"

namespace handoff {

/// Lower bound on MinChannelTime: DIFS plus a full contention window of slots.
inline Duration min_channel_time_bound(Duration difs, std::int64_t cw, Duration slot) {
  if (cw < 0) throw std::invalid_argument("contention window must be >= 0");
  return difs + slot * cw;
}

/// MAC timing used by every scan and handoff cost.
///
/// Construction enforces n_channels >= 1, min <= max dwell, and
/// MinChannelTime >= DIFS + CW * SlotTime.
class TimingParams {
 public:
  struct Fields {
    std::int64_t n_channels = 11;
    Duration min_channel_time = Duration::millis(7);
    Duration max_channel_time = Duration::millis(11);
    Duration t_switch = Duration::millis(5);
    Duration difs = Duration::micros(50);
    Duration slot_time = Duration::micros(20);
    std::int64_t cw = 31;
    Duration t_auth = Duration::millis(2);
    Duration t_assoc = Duration::millis(2);
    Duration beacon_interval = Duration::millis(100);
  };

  TimingParams() : TimingParams(Fields{}) {}

  explicit TimingParams(const Fields& f) : f_(f) {
    if (f.n_channels < 1) throw std::invalid_argument("n_channels must be >= 1");
    if (f.min_channel_time > f.max_channel_time)
      throw std::invalid_argument("min_channel_time exceeds max_channel_time");
    const Duration bound = min_channel_time_bound(f.difs, f.cw, f.slot_time);
    if (f.min_channel_time < bound)
      throw std::invalid_argument("min_channel_time " + to_string(f.min_channel_time) +
                                  " below DIFS + CW*SlotTime = " + to_string(bound));
  }

  std::int64_t n_channels() const { return f_.n_channels; }
  Duration min_channel_time() const { return f_.min_channel_time; }
  Duration max_channel_time() const { return f_.max_channel_time; }
  Duration t_switch() const { return f_.t_switch; }
  Duration difs() const { return f_.difs; }
  Duration slot_time() const { return f_.slot_time; }
  std::int64_t cw() const { return f_.cw; }
  Duration t_auth() const { return f_.t_auth; }
  Duration t_assoc() const { return f_.t_assoc; }
  Duration beacon_interval() const { return f_.beacon_interval; }
  const Fields& fields() const { return f_; }

 private:
  Fields f_;
};

/// (N * MinChannelTime, N * MaxChannelTime)
inline std::pair<Duration, Duration> probe_time_bounds(const TimingParams& p) {
  return {p.min_channel_time() * p.n_channels(), p.max_channel_time() * p.n_channels()};
}

/// N * (T_switch + T_probe) + T_authentication + T_association
inline Duration handover_latency(const TimingParams& p, Duration t_probe_per_channel) {
  return (p.t_switch() + t_probe_per_channel) * p.n_channels() + p.t_auth() + p.t_assoc();
}

/// Per-channel cost of a beacon-synchronised listen: switch away, wait, switch back.
inline Duration syncscan_delay(Duration t_switch, Duration t_wait) { return t_switch * 2 + t_wait; }

/// Total absence of one pre-scan sweep: N * (T_switch + T_wait).
inline Duration prescan_time(const TimingParams& p, Duration t_wait) {
  return (p.t_switch() + t_wait) * p.n_channels();
}

/// Pre-scan period: 1.5 * N * (T_switch + MaxChannelTime), half-up to whole microseconds.
inline Duration prescan_period_alpha(const TimingParams& p) {
  const Duration cycle = (p.t_switch() + p.max_channel_time()) * p.n_channels();
  const std::int64_t tripled = Duration::checked_mul(cycle.count(), 3);
  return Duration::micros((tripled + 1) / 2);
}

enum class AuthMode { OpenSystem, SharedKey };

/// Management frames exchanged during authentication.
inline std::int64_t auth_frame_count(AuthMode m) { return m == AuthMode::OpenSystem ? 2 : 4; }

/// Association / re-association request and response.
inline constexpr std::int64_t kAssocFrameCount = 2;

}  // namespace handoff
