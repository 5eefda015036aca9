#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace handoff {

/// Non-negative span of simulated time in whole microseconds.
///
/// All arithmetic is checked: a result that would leave [0, INT64_MAX]
/// throws std::overflow_error instead of wrapping.
class Duration {
 public:
  constexpr Duration() = default;

  static constexpr Duration micros(std::int64_t us) { return Duration(us); }
  static constexpr Duration millis(std::int64_t ms) { return Duration(checked_mul(ms, 1000)); }
  static constexpr Duration seconds(std::int64_t s) { return Duration(checked_mul(s, 1'000'000)); }
  static constexpr Duration zero() { return Duration(); }

  constexpr std::int64_t count() const { return us_; }
  constexpr double as_millis() const { return static_cast<double>(us_) / 1000.0; }
  constexpr double as_seconds() const { return static_cast<double>(us_) / 1e6; }

  constexpr auto operator<=>(const Duration&) const = default;

  constexpr Duration operator+(Duration other) const { return Duration(checked_add(us_, other.us_)); }
  constexpr Duration& operator+=(Duration other) { return *this = *this + other; }

  constexpr Duration operator-(Duration other) const {
    if (other.us_ > us_) throw std::overflow_error("Duration subtraction below zero");
    return Duration(us_ - other.us_);
  }

  constexpr Duration operator*(std::int64_t n) const { return Duration(checked_mul(us_, n)); }
  friend constexpr Duration operator*(std::int64_t n, Duration d) { return d * n; }

  static constexpr std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("Duration overflow");
    return out;
  }
  static constexpr std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("Duration overflow");
    return out;
  }

 private:
  constexpr explicit Duration(std::int64_t us) : us_(us) {
    if (us < 0) throw std::invalid_argument("Duration must be non-negative");
  }

  std::int64_t us_ = 0;
};

/// Absolute simulated instant, microseconds since run start.
class SimTime {
 public:
  constexpr SimTime() = default;
  static constexpr SimTime at_micros(std::int64_t us) { return SimTime(us); }
  static constexpr SimTime origin() { return SimTime(); }
  static constexpr SimTime never() { return SimTime(std::numeric_limits<std::int64_t>::max()); }

  constexpr std::int64_t micros() const { return us_; }
  constexpr double as_seconds() const { return static_cast<double>(us_) / 1e6; }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(Duration d) const {
    if (us_ == never().us_) return never();
    return SimTime(Duration::checked_add(us_, d.count()));
  }
  constexpr SimTime& operator+=(Duration d) { return *this = *this + d; }

  /// Elapsed time from `earlier` to this instant.
  constexpr Duration operator-(SimTime earlier) const {
    if (earlier.us_ > us_) throw std::overflow_error("SimTime difference is negative");
    return Duration::micros(us_ - earlier.us_);
  }

 private:
  constexpr explicit SimTime(std::int64_t us) : us_(us) {
    if (us < 0) throw std::invalid_argument("SimTime must be non-negative");
  }

  std::int64_t us_ = 0;
};

inline std::string to_string(Duration d) { return std::to_string(d.count()) + "us"; }

}  // namespace handoff
