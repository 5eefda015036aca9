#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "handoff/scenario.hpp"

namespace handoff {

/// Malformed or inconsistent configuration; `line` is 0 when not tied to one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A scenario plus the sweep axes requested by the [run] section.
struct RunPlan {
  Scenario scenario;
  std::vector<double> loads;          // empty: scenario.load only
  std::vector<std::uint64_t> seeds;   // empty: scenario.seed only
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const auto at = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, at == std::string_view::npos ? std::string_view::npos : at - pos)));
    if (at == std::string_view::npos) break;
    pos = at + 1;
  }
  return out;
}

inline double parse_double(std::string_view v, int line) {
  double d = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(d))
    throw ConfigError(line, "expected a number, got '" + std::string(v) + "'");
  return d;
}

inline std::int64_t parse_int(std::string_view v, int line) {
  std::int64_t i = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), i);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(line, "expected an integer, got '" + std::string(v) + "'");
  return i;
}

inline bool parse_bool(std::string_view v, int line) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(line, "expected true/false, got '" + std::string(v) + "'");
}

/// "250ms", "5 ms", "1.5s", "800us". A bare number is rejected.
inline Duration parse_duration(std::string_view v, int line) {
  std::size_t i = 0;
  while (i < v.size() && (std::isdigit(static_cast<unsigned char>(v[i])) || v[i] == '.')) ++i;
  const auto num = v.substr(0, i);
  const auto unit = trim(v.substr(i));
  if (num.empty()) throw ConfigError(line, "expected a duration, got '" + std::string(v) + "'");
  const double x = parse_double(num, line);
  double scale = 0.0;
  if (unit == "us") scale = 1.0;
  else if (unit == "ms") scale = 1e3;
  else if (unit == "s") scale = 1e6;
  else throw ConfigError(line, "duration '" + std::string(v) + "' needs a unit (us, ms, s)");
  const double us = x * scale;
  if (us != std::floor(us)) throw ConfigError(line, "duration '" + std::string(v) + "' is not a whole microsecond");
  if (us > 9.0e15) throw ConfigError(line, "duration '" + std::string(v) + "' is too large");
  return Duration::micros(static_cast<std::int64_t>(us));
}

inline std::vector<double> parse_numbers(std::string_view v, std::size_t n, int line) {
  const auto parts = split(v, ',');
  if (parts.size() != n)
    throw ConfigError(line, "expected " + std::to_string(n) + " comma-separated values, got '" + std::string(v) + "'");
  std::vector<double> out;
  for (auto p : parts) out.push_back(parse_double(p, line));
  return out;
}

inline Position parse_position(std::string_view v, int line) {
  const auto xy = parse_numbers(v, 2, line);
  return {xy[0], xy[1]};
}

}  // namespace detail

/// "1..10" or "1,4,9".
inline std::vector<std::uint64_t> parse_seed_list(std::string_view v, int line = 0) {
  std::vector<std::uint64_t> out;
  const auto dots = v.find("..");
  if (dots != std::string_view::npos) {
    const auto lo = detail::parse_int(detail::trim(v.substr(0, dots)), line);
    const auto hi = detail::parse_int(detail::trim(v.substr(dots + 2)), line);
    if (lo < 0 || hi < lo) throw ConfigError(line, "bad seed range '" + std::string(v) + "'");
    if (hi - lo >= 100000) throw ConfigError(line, "seed range too long");
    for (auto s = lo; s <= hi; ++s) out.push_back(static_cast<std::uint64_t>(s));
    return out;
  }
  for (auto p : detail::split(v, ',')) {
    const auto s = detail::parse_int(p, line);
    if (s < 0) throw ConfigError(line, "seeds are non-negative");
    out.push_back(static_cast<std::uint64_t>(s));
  }
  return out;
}

/// "0.1,0.5,0.9" or "0.1..0.9:0.1".
inline std::vector<double> parse_load_list(std::string_view v, int line = 0) {
  std::vector<double> out;
  const auto dots = v.find("..");
  if (dots != std::string_view::npos) {
    const auto colon = v.find(':', dots);
    if (colon == std::string_view::npos) throw ConfigError(line, "load range needs a step: lo..hi:step");
    const double lo = detail::parse_double(detail::trim(v.substr(0, dots)), line);
    const double hi = detail::parse_double(detail::trim(v.substr(dots + 2, colon - dots - 2)), line);
    const double step = detail::parse_double(detail::trim(v.substr(colon + 1)), line);
    if (!(step > 0.0) || hi < lo) throw ConfigError(line, "bad load range '" + std::string(v) + "'");
    const auto n = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::int64_t i = 0; i <= n; ++i) out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9);
  } else {
    for (auto p : detail::split(v, ',')) out.push_back(detail::parse_double(p, line));
  }
  for (double l : out)
    if (!(l >= 0.0 && l <= 1.0)) throw ConfigError(line, "loads must lie in [0, 1]");
  return out;
}

/// Parses the INI dialect: `[section]`, `key = value`, `#` or `;` comments.
/// Unknown sections and keys are errors; absent keys keep their defaults.
inline RunPlan parse_config(std::istream& in) {
  using detail::parse_bool;
  using detail::parse_double;
  using detail::parse_duration;
  using detail::parse_int;

  RunPlan plan;
  Scenario& s = plan.scenario;
  TimingParams::Fields tf = s.timing.fields();
  double rssi_min = s.thresholds.rssi_min().value();
  double rssi_prev = s.thresholds.rssi_prev().value();
  int thresholds_line = 0;
  int timing_line = 0;
  bool allow_fast = false;
  int speed_line = 0;
  bool have_aps = false;
  std::optional<SelectionPolicy> policy;
  std::string selection_mode = "none";
  int selection_line = 0;

  int weight_line = 0;

  auto pol = [&](int line) -> SelectionPolicy& {
    if (!weight_line) weight_line = line;
    if (!policy) policy.emplace();
    return *policy;
  };

  using Handler = std::function<void(std::string_view, int)>;
  const std::map<std::string, std::map<std::string, Handler>> table = {
      {"arena",
       {
           {"width", [&](auto v, int l) { s.arena.width = parse_double(v, l); }},
           {"height", [&](auto v, int l) { s.arena.height = parse_double(v, l); }},
       }},
      {"aps",
       {
           {"placement",
            [&](auto v, int l) {
              if (v == "hex") s.placement = Placement::Hex;
              else if (v == "grid") s.placement = Placement::Grid;
              else if (v == "explicit") s.placement = Placement::Explicit;
              else throw ConfigError(l, "placement must be hex, grid or explicit");
            }},
           {"count", [&](auto v, int l) { s.ap_count = parse_int(v, l); }},
           {"spacing", [&](auto v, int l) { s.spacing = parse_double(v, l); }},
           {"position", [&](auto v, int l) { s.ap_positions.push_back(detail::parse_position(v, l)); }},
           {"tx_power_dbm", [&](auto v, int l) { s.tx_power = Dbm(parse_double(v, l)); }},
           {"tx_power_reference", [&](auto v, int l) { s.tx_power_reference = parse_double(v, l); }},
           {"frequency_hz", [&](auto v, int l) { s.frequency_hz = parse_double(v, l); }},
           {"rx_sensitivity_dbm", [&](auto v, int l) { s.rx_sensitivity = Dbm(parse_double(v, l)); }},
           {"neighbor_radius", [&](auto v, int l) { s.neighbor_radius = parse_double(v, l); }},
           {"capacity", [&](auto v, int l) { s.capacity = parse_int(v, l); }},
           {"penalty",
            [&](auto v, int l) {
              const auto n = detail::parse_numbers(v, 6, l);
              RssiPenalty p;
              p.ap = static_cast<ApId>(n[0]);
              p.x0 = n[1];
              p.y0 = n[2];
              p.x1 = n[3];
              p.y1 = n[4];
              p.db = n[5];
              if (n[0] != std::floor(n[0]) || p.x1 < p.x0 || p.y1 < p.y0 || p.db < 0.0)
                throw ConfigError(l, "penalty is ap,x0,y0,x1,y1,db with x0<=x1, y0<=y1, db>=0");
              s.penalties.push_back(p);
            }},
           {"history",
            [&](auto v, int l) {
              const auto n = detail::parse_numbers(v, 3, l);
              if (n[0] != std::floor(n[0]) || n[1] != std::floor(n[1]) || n[2] != std::floor(n[2]) || n[2] < 0)
                throw ConfigError(l, "history is from,to,count with integer values");
              s.history_seed.push_back({static_cast<ApId>(n[0]), static_cast<ApId>(n[1]), static_cast<std::int64_t>(n[2])});
            }},
       }},
      {"timing",
       {
           {"channels", [&](auto v, int l) { tf.n_channels = parse_int(v, l); timing_line = l; }},
           {"min_channel_time", [&](auto v, int l) { tf.min_channel_time = parse_duration(v, l); timing_line = l; }},
           {"max_channel_time", [&](auto v, int l) { tf.max_channel_time = parse_duration(v, l); timing_line = l; }},
           {"switch_delay", [&](auto v, int l) { tf.t_switch = parse_duration(v, l); timing_line = l; }},
           {"difs", [&](auto v, int l) { tf.difs = parse_duration(v, l); timing_line = l; }},
           {"slot_time", [&](auto v, int l) { tf.slot_time = parse_duration(v, l); timing_line = l; }},
           {"cw", [&](auto v, int l) { tf.cw = parse_int(v, l); timing_line = l; }},
           {"t_auth", [&](auto v, int l) { tf.t_auth = parse_duration(v, l); timing_line = l; }},
           {"t_assoc", [&](auto v, int l) { tf.t_assoc = parse_duration(v, l); timing_line = l; }},
           {"beacon_interval", [&](auto v, int l) { tf.beacon_interval = parse_duration(v, l); timing_line = l; }},
           {"prescan_wait", [&](auto v, int l) { s.prescan_wait = parse_duration(v, l); }},
           {"retry_backoff", [&](auto v, int l) { s.retry_backoff = parse_duration(v, l); }},
           {"tick", [&](auto v, int l) { s.tick = parse_duration(v, l); }},
           {"auth",
            [&](auto v, int l) {
              if (v == "open") s.auth = AuthMode::OpenSystem;
              else if (v == "shared") s.auth = AuthMode::SharedKey;
              else throw ConfigError(l, "auth must be open or shared");
            }},
       }},
      {"thresholds",
       {
           {"handoff_dbm", [&](auto v, int l) { rssi_min = parse_double(v, l); thresholds_line = l; }},
           {"prescan_dbm", [&](auto v, int l) { rssi_prev = parse_double(v, l); thresholds_line = l; }},
       }},
      {"mobility",
       {
           {"model",
            [&](auto v, int l) {
              if (v == "random_waypoint") s.mobility = MobilityModel::RandomWaypoint;
              else if (v == "random_direction") s.mobility = MobilityModel::RandomDirection;
              else if (v == "static") s.mobility = MobilityModel::Static;
              else if (v == "scripted") s.mobility = MobilityModel::Scripted;
              else throw ConfigError(l, "model must be random_waypoint, random_direction, static or scripted");
            }},
           {"stations", [&](auto v, int l) { s.stations = parse_int(v, l); }},
           {"speed_min", [&](auto v, int l) { s.mobility_params.speed_min = parse_double(v, l); speed_line = l; }},
           {"speed_max", [&](auto v, int l) { s.mobility_params.speed_max = parse_double(v, l); speed_line = l; }},
           {"allow_fast", [&](auto v, int l) { allow_fast = parse_bool(v, l); }},
           {"pause_min", [&](auto v, int l) { s.mobility_params.pause_min = parse_duration(v, l); }},
           {"pause_max", [&](auto v, int l) { s.mobility_params.pause_max = parse_duration(v, l); }},
           {"edge_pause", [&](auto v, int l) { s.mobility_params.edge_pause = parse_duration(v, l); }},
           {"waypoint", [&](auto v, int l) { s.path.push_back(detail::parse_position(v, l)); }},
           {"path_speed", [&](auto v, int l) { s.path_speed = parse_double(v, l); }},
           {"start", [&](auto v, int l) { s.station_positions.push_back(detail::parse_position(v, l)); }},
       }},
      {"traffic",
       {
           {"preset",
            [&](auto v, int l) {
              auto p = parse_traffic_preset(v);
              if (!p) throw ConfigError(l, "preset must be voip_only, mix_75_25 or mix_50_50");
              s.traffic = *p;
            }},
           {"inter_arrival", [&](auto v, int l) { s.inter_arrival = parse_duration(v, l); }},
           {"deadline", [&](auto v, int l) { s.deadline = parse_duration(v, l); }},
           {"psm_capacity",
            [&](auto v, int l) {
              const auto c = parse_int(v, l);
              if (c < 1) throw ConfigError(l, "psm_capacity must be >= 1");
              s.psm_capacity = static_cast<std::size_t>(c);
            }},
           {"base_delay", [&](auto v, int l) { s.contention.base_delay = parse_duration(v, l); }},
           {"contention_factor", [&](auto v, int l) { s.contention.contention_factor = parse_double(v, l); }},
           {"jitter", [&](auto v, int l) { s.contention.jitter = parse_double(v, l); }},
           {"load", [&](auto v, int l) { s.load = parse_double(v, l); }},
       }},
      {"scheme",
       {
           {"name",
            [&](auto v, int l) {
              auto k = parse_scheme(v);
              if (!k) throw ConfigError(l, "scheme must be standard_active, standard_passive, apfh or pshp");
              s.scheme = *k;
            }},
       }},
      {"selection",
       {
           {"mode",
            [&](auto v, int l) {
              selection_mode = std::string(v);
              selection_line = l;
            }},
           {"w_rssi", [&](auto v, int l) { pol(l).w_rssi = parse_double(v, l); }},
           {"w_ext", [&](auto v, int l) { pol(l).w_ext = parse_double(v, l); }},
           {"w_cnx", [&](auto v, int l) { pol(l).w_cnx = parse_double(v, l); }},
           {"w_load", [&](auto v, int l) { pol(l).w_load = parse_double(v, l); }},
           {"ext_mode",
            [&](auto v, int l) {
              if (v == "neighbor_count") s.selection.ext_mode = ExtMode::NeighborCount;
              else if (v == "two_hop") s.selection.ext_mode = ExtMode::TwoHopOnly;
              else throw ConfigError(l, "ext_mode must be neighbor_count or two_hop");
            }},
       }},
      {"run",
       {
           {"seed",
            [&](auto v, int l) {
              const auto x = parse_int(v, l);
              if (x < 0) throw ConfigError(l, "seed must be >= 0");
              s.seed = static_cast<std::uint64_t>(x);
            }},
           {"seeds", [&](auto v, int l) { plan.seeds = parse_seed_list(v, l); }},
           {"loads", [&](auto v, int l) { plan.loads = parse_load_list(v, l); }},
           {"duration", [&](auto v, int l) { s.duration = parse_duration(v, l); }},
           {"noise_std_db", [&](auto v, int l) { s.noise_std_db = parse_double(v, l); }},
       }},
  };

  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view t = detail::trim(raw);
    if (const auto c = t.find_first_of("#;"); c != std::string_view::npos) t = detail::trim(t.substr(0, c));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(line, "unterminated section header");
      section = std::string(detail::trim(t.substr(1, t.size() - 2)));
      if (!table.count(section)) throw ConfigError(line, "unknown section [" + section + "]");
      if (section == "aps") have_aps = true;
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line, "expected key = value");
    const std::string key(detail::trim(t.substr(0, eq)));
    const auto value = detail::trim(t.substr(eq + 1));
    if (section.empty()) throw ConfigError(line, "key '" + key + "' outside any section");
    const auto& keys = table.at(section);
    const auto h = keys.find(key);
    if (h == keys.end()) throw ConfigError(line, "unknown key '" + key + "' in [" + section + "]");
    if (value.empty()) throw ConfigError(line, "empty value for '" + key + "'");
    h->second(value, line);
  }
  if (in.bad()) throw std::ios_base::failure("config read failed");
  if (!have_aps) throw ConfigError(0, "missing required section [aps]");

  try {
    s.timing = TimingParams(tf);
  } catch (const std::exception& e) {
    throw ConfigError(timing_line, e.what());
  }
  try {
    s.thresholds = Thresholds::from_prescan(Dbm(rssi_min), Dbm(rssi_prev));
  } catch (const std::exception& e) {
    throw ConfigError(thresholds_line, e.what());
  }
  if (s.mobility_params.speed_max > 15.0 && !allow_fast)
    throw ConfigError(speed_line, "speed_max above 15 m/s needs allow_fast = true");

  if (selection_mode == "none") {
    if (policy) throw ConfigError(weight_line, "selection weights given but mode = none");
    s.selection.policy.reset();
  } else {
    auto m = parse_selection_mode(selection_mode);
    if (!m) throw ConfigError(selection_line, "mode must be none, weighted_sum, lexicographic or rssi_only");
    if (!policy) policy.emplace();
    policy->mode = *m;
    s.selection.policy = policy;
  }

  try {
    s.validate();
    for (double l : plan.loads) {
      Scenario probe = s;
      probe.load = l;
      probe.validate();
    }
    build_world(s);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(0, e.what());
  }
  return plan;
}

inline RunPlan parse_config_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_config(in);
}

/// Reads a config file; an unreadable file raises std::ios_base::failure.
inline RunPlan load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file " + path);
  return parse_config(in);
}

}  // namespace handoff
