#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "handoff/ap_selection.hpp"
#include "handoff/latency_model.hpp"
#include "handoff/mobility.hpp"
#include "handoff/propagation.hpp"
#include "handoff/schemes.hpp"
#include "handoff/traffic.hpp"

namespace handoff {

enum class Placement { Hex, Grid, Explicit };

/// Extra attenuation applied to one AP's signal inside a rectangle.
struct RssiPenalty {
  ApId ap = -1;  // -1: every AP
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double db = 0.0;

  bool covers(Position p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

struct HistorySeed {
  ApId from = -1;
  ApId to = -1;
  std::int64_t count = 0;
};

/// Everything one simulation run needs. Defaults follow the reference
/// parameter table: 0.1-15 m/s random waypoint, 7/11 ms channel dwell,
/// 5 ms switch, handoff threshold -51, pre-scan threshold -45.
struct Scenario {
  // [arena] -- zero width/height: derived from the AP layout
  Arena arena;

  // [aps]
  Placement placement = Placement::Hex;
  std::int64_t ap_count = 25;
  double spacing = 60.0;                // m
  std::vector<Position> ap_positions;   // explicit placement
  std::optional<Dbm> tx_power;          // empty: derived from tx_power_reference
  double tx_power_reference = 0.5;      // fraction of spacing where RSSI equals the pre-scan threshold
  double frequency_hz = 2.4e9;
  Dbm rx_sensitivity = Dbm(-60.0);
  double neighbor_radius = 0.0;         // 0: 1.5 * spacing

  // [timing]
  TimingParams timing;
  std::optional<Duration> prescan_wait;  // empty: MaxChannelTime
  AuthMode auth = AuthMode::OpenSystem;
  Duration retry_backoff = Duration::millis(100);

  // [thresholds]
  Thresholds thresholds = Thresholds::from_prescan(Dbm(-51.0), Dbm(-45.0));

  // [mobility]
  MobilityModel mobility = MobilityModel::RandomWaypoint;
  MobilityParams mobility_params;
  std::int64_t stations = 100;
  Duration tick = Duration::millis(10);
  std::vector<Position> path;             // scripted: shared by all stations
  double path_speed = 1.0;                // scripted speed, m/s
  std::vector<Position> station_positions; // static/scripted start points (optional)
  std::vector<RssiPenalty> penalties;

  // [traffic]
  TrafficPreset traffic = TrafficPreset::VoipOnly;
  Duration inter_arrival = Duration::millis(20);
  Duration deadline = Duration::millis(50);
  std::size_t psm_capacity = 64;
  ContentionParams contention;
  double load = 0.5;

  // [scheme] / [selection]
  SchemeKind scheme = SchemeKind::Pshp;
  SelectionConfig selection;
  std::vector<HistorySeed> history_seed;
  std::int64_t capacity = 32;

  // [run]
  std::uint64_t seed = 1;
  Duration duration = Duration::seconds(10);
  double noise_std_db = 0.0;

  Duration effective_prescan_wait() const { return prescan_wait.value_or(timing.max_channel_time()); }

  void validate() const {
    if (duration <= Duration::zero()) throw std::invalid_argument("duration must be > 0");
    if (tick <= Duration::zero()) throw std::invalid_argument("tick must be > 0");
    if (stations < 0 || stations > 500) throw std::invalid_argument("stations must be in [0, 500]");
    if (placement == Placement::Explicit) {
      if (ap_positions.empty()) throw std::invalid_argument("explicit placement needs AP positions");
      if (ap_positions.size() > 100) throw std::invalid_argument("at most 100 APs");
    } else {
      if (ap_count < 1 || ap_count > 100) throw std::invalid_argument("ap count must be in [1, 100]");
      if (!(spacing > 0.0)) throw std::invalid_argument("spacing must be > 0");
    }
    if (arena.width != 0.0 || arena.height != 0.0) arena.validate();
    if (!(frequency_hz > 0.0)) throw std::invalid_argument("frequency must be > 0");
    if (!(tx_power_reference > 0.0)) throw std::invalid_argument("tx_power_reference must be > 0");
    if (!(load >= 0.0 && load <= 1.0)) throw std::invalid_argument("load must be in [0, 1]");
    if (!(mobility_params.speed_min > 0.0) || mobility_params.speed_min > mobility_params.speed_max)
      throw std::invalid_argument("speed range must satisfy 0 < min <= max");
    if (mobility_params.pause_min > mobility_params.pause_max)
      throw std::invalid_argument("pause_min exceeds pause_max");
    if (mobility == MobilityModel::Scripted && path.empty())
      throw std::invalid_argument("scripted mobility needs a path");
    if (!(noise_std_db >= 0.0)) throw std::invalid_argument("noise_std must be >= 0");
    if (capacity < 1) throw std::invalid_argument("capacity must be >= 1");
    VoipSource{inter_arrival, deadline, {}}.validate();
    contention.validate();
    if (selection.policy) selection.policy->validate();
    // The next sweep must not start before the current one can finish.
    if (effective_prescan_wait() <= timing.max_channel_time() &&
        prescan_period_alpha(timing) < prescan_time(timing, effective_prescan_wait()))
      throw std::logic_error("pre-scan period shorter than one sweep");
  }
};

/// AP layout and radio constants derived from a scenario.
struct World {
  Arena arena;
  std::vector<Position> aps;
  std::vector<std::int64_t> channel;             // per AP, 0-based
  std::vector<std::vector<ApId>> on_channel;     // per channel
  Dbm tx_power;
  double neighbor_radius = 0.0;
};

inline std::vector<Position> layout_aps(const Scenario& s) {
  std::vector<Position> out;
  if (s.placement == Placement::Explicit) return s.ap_positions;
  const auto cols = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(s.ap_count))));
  const double row_pitch = s.placement == Placement::Hex ? s.spacing * std::sqrt(3.0) / 2.0 : s.spacing;
  for (std::int64_t i = 0; i < s.ap_count; ++i) {
    const std::int64_t r = i / cols;
    const std::int64_t c = i % cols;
    const double shift = (s.placement == Placement::Hex && r % 2 == 1) ? s.spacing / 2.0 : 0.0;
    out.push_back({static_cast<double>(c) * s.spacing + shift, static_cast<double>(r) * row_pitch});
  }
  return out;
}

inline World build_world(const Scenario& s) {
  World w;
  w.aps = layout_aps(s);
  if (s.arena.width > 0.0 && s.arena.height > 0.0) {
    w.arena = s.arena;
  } else {
    // Stations roam the deployment's bounding box; a degenerate side (one row
    // or column of APs) is widened to one spacing.
    double mx = 0.0, my = 0.0;
    for (const auto& p : w.aps) {
      mx = std::max(mx, p.x);
      my = std::max(my, p.y);
    }
    const double min_side = s.placement == Placement::Explicit ? 0.0 : s.spacing;
    w.arena = {std::max(mx, min_side), std::max(my, min_side)};
  }
  w.arena.validate();
  for (const auto& p : w.aps)
    if (!w.arena.contains(p)) throw std::invalid_argument("AP placed outside the arena");

  const auto n_ch = s.timing.n_channels();
  w.on_channel.assign(static_cast<std::size_t>(n_ch), {});
  for (std::size_t i = 0; i < w.aps.size(); ++i) {
    const auto ch = static_cast<std::int64_t>(i) % n_ch;
    w.channel.push_back(ch);
    w.on_channel[static_cast<std::size_t>(ch)].push_back(static_cast<ApId>(i));
  }
  const double ref_spacing = s.placement == Placement::Explicit && s.spacing <= 0.0 ? 1.0 : s.spacing;
  w.tx_power = s.tx_power.value_or(
      transmit_power_for(s.thresholds.rssi_prev(), s.tx_power_reference * ref_spacing, s.frequency_hz));
  w.neighbor_radius = s.neighbor_radius > 0.0 ? s.neighbor_radius : 1.5 * s.spacing;
  return w;
}

}  // namespace handoff
