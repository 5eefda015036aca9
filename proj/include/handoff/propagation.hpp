#pragma once

#include <cmath>
#include <compare>
#include <numbers>
#include <stdexcept>
#include <string>

namespace handoff {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

/// Signal strength in dBm. Higher is stronger.
class Dbm {
 public:
  constexpr Dbm() = default;
  explicit Dbm(double v) : value_(v) {
    if (!std::isfinite(v)) throw std::invalid_argument("Dbm value must be finite");
  }

  double value() const { return value_; }

  auto operator<=>(const Dbm&) const = default;

  Dbm operator+(double db) const { return Dbm(value_ + db); }
  Dbm operator-(double db) const { return Dbm(value_ - db); }
  double operator-(Dbm other) const { return value_ - other.value_; }

 private:
  double value_ = 0.0;
};

struct Position {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Position&) const = default;
};

inline double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline double wavelength(double frequency_hz) { return kSpeedOfLight / frequency_hz; }

/// Free-space received power: p0 - 20 log10(4 pi d / lambda).
inline Dbm received_power(Dbm p0, double distance_m, double frequency_hz) {
  if (!std::isfinite(distance_m) || !std::isfinite(frequency_hz))
    throw std::invalid_argument("received_power: non-finite input");
  if (distance_m <= 0.0) throw std::invalid_argument("received_power: distance must be > 0");
  if (frequency_hz <= 0.0) throw std::invalid_argument("received_power: frequency must be > 0");
  const double lambda = wavelength(frequency_hz);
  return Dbm(p0.value() - 20.0 * std::log10(4.0 * std::numbers::pi * distance_m / lambda));
}

/// Transmit power that makes received_power(result, distance_m, f) == target.
inline Dbm transmit_power_for(Dbm target, double distance_m, double frequency_hz) {
  if (!(distance_m > 0.0) || !(frequency_hz > 0.0))
    throw std::invalid_argument("transmit_power_for: distance and frequency must be > 0");
  const double lambda = wavelength(frequency_hz);
  return Dbm(target.value() + 20.0 * std::log10(4.0 * std::numbers::pi * distance_m / lambda));
}

/// Midpoint between the handoff threshold and the best attainable link quality.
inline Dbm prevent_threshold(Dbm rssi_min, Dbm rssi_max) {
  if (!(rssi_min < rssi_max))
    throw std::invalid_argument("prevent_threshold: rssi_min must be below rssi_max");
  return Dbm(rssi_min.value() + (rssi_max.value() - rssi_min.value()) / 2.0);
}

/// Handoff threshold, best link quality and the derived preventive threshold.
class Thresholds {
 public:
  Thresholds(Dbm rssi_min, Dbm rssi_max)
      : min_(rssi_min), max_(rssi_max), prev_(prevent_threshold(rssi_min, rssi_max)) {}

  /// Builds thresholds from the handoff and pre-scan levels, inverting the midpoint rule.
  static Thresholds from_prescan(Dbm rssi_min, Dbm rssi_prev) {
    if (!(rssi_min < rssi_prev))
      throw std::invalid_argument("pre-scan threshold must be above the handoff threshold");
    return Thresholds(rssi_min, Dbm(2.0 * rssi_prev.value() - rssi_min.value()));
  }

  Dbm rssi_min() const { return min_; }
  Dbm rssi_max() const { return max_; }
  Dbm rssi_prev() const { return prev_; }

 private:
  Dbm min_;
  Dbm max_;
  Dbm prev_;
};

enum class Zone { Safe, Gray, Handover };

inline const char* to_string(Zone z) {
  switch (z) {
    case Zone::Safe: return "safe";
    case Zone::Gray: return "gray";
    case Zone::Handover: return "handover";
  }
  return "?";
}

// Closed upper boundaries: rssi == prev is Safe, rssi == min is Handover.
inline Zone classify_zone(Dbm rssi, const Thresholds& t) {
  if (rssi >= t.rssi_prev()) return Zone::Safe;
  if (rssi > t.rssi_min()) return Zone::Gray;
  return Zone::Handover;
}

}  // namespace handoff
