#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "handoff/rng.hpp"
#include "handoff/time.hpp"

namespace handoff {

/// Periodic constant-bit-rate source (VoIP by default: 20 ms spacing, 50 ms deadline).
struct VoipSource {
  Duration inter_arrival = Duration::millis(20);
  Duration deadline = Duration::millis(50);
  SimTime next_emit;

  void validate() const {
    if (inter_arrival <= Duration::zero()) throw std::invalid_argument("inter_arrival must be > 0");
    if (deadline <= inter_arrival) throw std::invalid_argument("deadline must exceed inter_arrival");
  }
};

/// Emission instant of the next packet if one is due at `now`; advances the source by one period.
inline std::optional<SimTime> next_packet(VoipSource& src, SimTime now) {
  if (now < src.next_emit) return std::nullopt;
  const SimTime at = src.next_emit;
  src.next_emit = at + src.inter_arrival;
  return at;
}

/// True when a packet emitted at `emitted` and delivered at `delivered` missed its deadline.
inline bool misses_deadline(SimTime emitted, SimTime delivered, Duration deadline) {
  return delivered - emitted > deadline;
}

struct Packet {
  std::uint64_t id = 0;
  std::int32_t ms = -1;
  SimTime emitted_at;
  bool realtime = true;
};

struct Delivery {
  Packet packet;
  SimTime delivered_at;
};

/// Downlink frames an AP holds for one station while it is in power-save.
class PsmBuffer {
 public:
  explicit PsmBuffer(std::size_t capacity = 64) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("PSM buffer capacity must be > 0");
  }

  bool active() const { return active_; }
  std::size_t size() const { return queue_.size(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<Packet>& queued() const { return queue_; }

  void enter() { active_ = true; }

  /// Queues `p`; when full the oldest frame is evicted and returned.
  std::optional<Packet> enqueue(const Packet& p) {
    if (!active_) throw std::logic_error("PsmBuffer::enqueue while not in power-save");
    std::optional<Packet> evicted;
    if (queue_.size() == capacity_) {
      evicted = queue_.front();
      queue_.pop_front();
    }
    queue_.push_back(p);
    return evicted;
  }

  /// Leaves power-save and drains FIFO; frames go out back to back, each paying `access_delay()`.
  template <typename AccessDelayFn>
  std::vector<Delivery> flush(SimTime now, AccessDelayFn&& access_delay) {
    active_ = false;
    std::vector<Delivery> out;
    out.reserve(queue_.size());
    SimTime t = now;
    while (!queue_.empty()) {
      t += access_delay();
      out.push_back({queue_.front(), t});
      queue_.pop_front();
    }
    return out;
  }

  /// Drops everything without delivering (the station left this AP).
  std::vector<Packet> discard() {
    active_ = false;
    std::vector<Packet> out(queue_.begin(), queue_.end());
    queue_.clear();
    return out;
  }

 private:
  std::deque<Packet> queue_;
  std::size_t capacity_;
  bool active_ = false;
};

inline constexpr std::int64_t kMaxActiveStations = 32;

/// Active stations in one cell; traffic load is active / 32.
struct LoadModel {
  std::int64_t active = 0;
  std::int64_t max_active = kMaxActiveStations;

  double fraction() const {
    if (active < 0 || active > max_active) throw std::invalid_argument("load out of range");
    return static_cast<double>(active) / static_cast<double>(max_active);
  }
};

struct ContentionParams {
  Duration base_delay = Duration::millis(1);
  double contention_factor = 4.0;
  double jitter = 0.2;  // half-width of the uniform multiplicative jitter

  void validate() const {
    if (contention_factor < 0.0 || !std::isfinite(contention_factor))
      throw std::invalid_argument("contention_factor must be >= 0");
    if (jitter < 0.0 || jitter >= 1.0) throw std::invalid_argument("jitter must be in [0, 1)");
  }
};

/// Expected per-frame medium access delay in microseconds (no jitter).
inline double expected_access_delay_us(const LoadModel& load, const ContentionParams& c) {
  return static_cast<double>(c.base_delay.count()) * (1.0 + c.contention_factor * load.fraction());
}

/// One frame's channel access time: base * (1 + factor * load), scaled by uniform jitter.
///
/// The RNG is consumed only when jitter is enabled.
inline Duration medium_access_delay(const LoadModel& load, const ContentionParams& c, Rng& rng) {
  double us = expected_access_delay_us(load, c);
  if (c.jitter > 0.0) us *= rng.uniform(1.0 - c.jitter, 1.0 + c.jitter);
  return Duration::micros(std::llround(us));
}

enum class TrafficPreset { VoipOnly, Mix75_25, Mix50_50 };

/// Share of stations carrying deadline-bound (real-time) traffic.
inline double realtime_share(TrafficPreset p) {
  switch (p) {
    case TrafficPreset::VoipOnly: return 1.0;
    case TrafficPreset::Mix75_25: return 0.75;
    case TrafficPreset::Mix50_50: return 0.5;
  }
  return 1.0;
}

inline const char* to_string(TrafficPreset p) {
  switch (p) {
    case TrafficPreset::VoipOnly: return "voip_only";
    case TrafficPreset::Mix75_25: return "mix_75_25";
    case TrafficPreset::Mix50_50: return "mix_50_50";
  }
  return "?";
}

inline std::optional<TrafficPreset> parse_traffic_preset(std::string_view s) {
  if (s == "voip_only") return TrafficPreset::VoipOnly;
  if (s == "mix_75_25") return TrafficPreset::Mix75_25;
  if (s == "mix_50_50") return TrafficPreset::Mix50_50;
  return std::nullopt;
}

}  // namespace handoff
