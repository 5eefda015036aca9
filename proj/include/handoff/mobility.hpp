#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "handoff/propagation.hpp"
#include "handoff/rng.hpp"
#include "handoff/time.hpp"

namespace handoff {

/// Closed rectangle [0, width] x [0, height], meters.
struct Arena {
  double width = 0.0;
  double height = 0.0;

  void validate() const {
    if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height))
      throw std::invalid_argument("arena must have positive finite area");
  }
  bool contains(Position p) const { return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height; }
  Position clamp(Position p) const {
    return {std::clamp(p.x, 0.0, width), std::clamp(p.y, 0.0, height)};
  }
};

enum class MobilityModel { RandomWaypoint, RandomDirection, Static, Scripted };

struct MobilityParams {
  double speed_min = 0.1;  // m/s
  double speed_max = 15.0;
  Duration pause_min = Duration::zero();  // random waypoint dwell at each target
  Duration pause_max = Duration::seconds(2);
  Duration edge_pause = Duration::zero();  // random direction dwell at the border
};

struct MobilityState {
  MobilityModel model = MobilityModel::Static;
  Position current;
  Position target;       // waypoint models
  double heading = 0.0;  // radians, random direction
  double speed = 0.0;    // m/s
  SimTime pause_until;
  std::vector<Position> path;  // scripted waypoints, consumed front to back
  std::size_t next_waypoint = 0;
};

namespace detail {

inline Duration draw_pause(Duration lo, Duration hi, Rng& rng) {
  if (hi <= lo) return lo;
  const double span = static_cast<double>((hi - lo).count());
  return lo + Duration::micros(static_cast<std::int64_t>(std::floor(rng.uniform01() * span)));
}

inline double draw_speed(const MobilityParams& p, Rng& rng) { return rng.uniform(p.speed_min, p.speed_max); }

inline Position draw_point(const Arena& a, Rng& rng) {
  const double x = rng.uniform(0.0, a.width);
  const double y = rng.uniform(0.0, a.height);
  return {x, y};
}

// True when travelling along `heading` from p immediately enters the interior.
inline bool points_inward(Position p, double heading, const Arena& a) {
  const double dx = std::cos(heading);
  const double dy = std::sin(heading);
  constexpr double eps = 1e-12;
  if (p.x <= 0.0 && !(dx > eps)) return false;
  if (p.x >= a.width && !(dx < -eps)) return false;
  if (p.y <= 0.0 && !(dy > eps)) return false;
  if (p.y >= a.height && !(dy < -eps)) return false;
  return true;
}

inline double draw_inward_heading(Position p, const Arena& a, Rng& rng) {
  for (;;) {
    const double h = rng.uniform(0.0, 2.0 * std::numbers::pi);
    if (points_inward(p, h, a)) return h;
  }
}

// Advance toward `to` by at most `budget` meters; returns true on arrival.
inline bool advance_toward(Position& at, Position to, double budget) {
  const double d = distance(at, to);
  if (d <= budget) {
    at = to;
    return true;
  }
  at.x += (to.x - at.x) * (budget / d);
  at.y += (to.y - at.y) * (budget / d);
  return false;
}

}  // namespace detail

/// Initial state for a station placed uniformly at random in the arena.
inline MobilityState init_random(MobilityModel model, const Arena& arena, const MobilityParams& p, Rng& rng) {
  MobilityState s;
  s.model = model;
  s.current = detail::draw_point(arena, rng);
  switch (model) {
    case MobilityModel::RandomWaypoint:
      s.target = detail::draw_point(arena, rng);
      s.speed = detail::draw_speed(p, rng);
      break;
    case MobilityModel::RandomDirection:
      s.heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
      s.speed = detail::draw_speed(p, rng);
      break;
    case MobilityModel::Static:
    case MobilityModel::Scripted:
      break;
  }
  return s;
}

/// Random waypoint: travel to the target; on arrival draw pause, then target, then speed.
inline MobilityState rwp_step(MobilityState s, SimTime now, Duration dt, const Arena& arena,
                              const MobilityParams& p, Rng& rng) {
  if (s.model != MobilityModel::RandomWaypoint) throw std::invalid_argument("rwp_step: wrong model");
  if (dt <= Duration::zero()) throw std::invalid_argument("rwp_step: dt must be > 0");
  if (now < s.pause_until) return s;
  const bool arrived = detail::advance_toward(s.current, s.target, s.speed * dt.as_seconds());
  s.current = arena.clamp(s.current);
  if (arrived) {
    s.pause_until = now + dt + detail::draw_pause(p.pause_min, p.pause_max, rng);
    s.target = detail::draw_point(arena, rng);
    s.speed = detail::draw_speed(p, rng);
  }
  return s;
}

/// Random direction: travel straight to the border, pause, then turn inward with a fresh speed.
inline MobilityState rd_step(MobilityState s, SimTime now, Duration dt, const Arena& arena,
                             const MobilityParams& p, Rng& rng) {
  if (s.model != MobilityModel::RandomDirection) throw std::invalid_argument("rd_step: wrong model");
  if (dt <= Duration::zero()) throw std::invalid_argument("rd_step: dt must be > 0");
  if (now < s.pause_until) return s;

  if (!detail::points_inward(s.current, s.heading, arena)) {
    // Sitting on the border facing out: turn before moving.
    s.heading = detail::draw_inward_heading(s.current, arena, rng);
    s.speed = detail::draw_speed(p, rng);
  }

  const double budget = s.speed * dt.as_seconds();
  const double dx = std::cos(s.heading);
  const double dy = std::sin(s.heading);

  // Distance along the heading to the first border crossing.
  double to_edge = std::numeric_limits<double>::infinity();
  if (dx > 0) to_edge = std::min(to_edge, (arena.width - s.current.x) / dx);
  if (dx < 0) to_edge = std::min(to_edge, -s.current.x / dx);
  if (dy > 0) to_edge = std::min(to_edge, (arena.height - s.current.y) / dy);
  if (dy < 0) to_edge = std::min(to_edge, -s.current.y / dy);

  if (budget < to_edge) {
    s.current = arena.clamp({s.current.x + dx * budget, s.current.y + dy * budget});
    return s;
  }

  s.current = arena.clamp({s.current.x + dx * to_edge, s.current.y + dy * to_edge});
  // Snap the coordinate that hit the border so the inward test is exact.
  if (dx > 0 && arena.width - s.current.x < 1e-9) s.current.x = arena.width;
  if (dx < 0 && s.current.x < 1e-9) s.current.x = 0.0;
  if (dy > 0 && arena.height - s.current.y < 1e-9) s.current.y = arena.height;
  if (dy < 0 && s.current.y < 1e-9) s.current.y = 0.0;
  s.pause_until = now + dt + p.edge_pause;
  s.heading = detail::draw_inward_heading(s.current, arena, rng);
  s.speed = detail::draw_speed(p, rng);
  return s;
}

/// Scripted path at constant speed; stays at the last waypoint.
inline MobilityState scripted_step(MobilityState s, Duration dt) {
  double budget = s.speed * dt.as_seconds();
  while (budget > 0.0 && s.next_waypoint < s.path.size()) {
    const Position to = s.path[s.next_waypoint];
    const double d = distance(s.current, to);
    if (detail::advance_toward(s.current, to, budget)) {
      ++s.next_waypoint;
      budget -= d;
    } else {
      budget = 0.0;
    }
  }
  return s;
}

inline MobilityState mobility_step(MobilityState s, SimTime now, Duration dt, const Arena& arena,
                                   const MobilityParams& p, Rng& rng) {
  switch (s.model) {
    case MobilityModel::RandomWaypoint: return rwp_step(std::move(s), now, dt, arena, p, rng);
    case MobilityModel::RandomDirection: return rd_step(std::move(s), now, dt, arena, p, rng);
    case MobilityModel::Scripted: return scripted_step(std::move(s), dt);
    case MobilityModel::Static: return s;
  }
  return s;
}

}  // namespace handoff
