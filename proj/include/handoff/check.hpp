#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "handoff/latency_model.hpp"
#include "handoff/propagation.hpp"

namespace handoff {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Closed-form self-checks run by `--check`: every timing identity on
/// reference-table values, the preventive threshold and the path-loss
/// decade law.
inline std::vector<CheckResult> formula_self_check() {
  std::vector<CheckResult> out;
  auto ms = [](std::int64_t v) { return Duration::millis(v); };
  auto us = [](std::int64_t v) { return Duration::micros(v); };
  auto expect = [&](std::string name, Duration got, Duration want) {
    out.push_back({std::move(name), got == want, to_string(got) + " (want " + to_string(want) + ")"});
  };
  auto timing = [](std::int64_t n) {
    TimingParams::Fields f;
    f.n_channels = n;
    return TimingParams(f);
  };
  auto zeros = [] {
    TimingParams::Fields f;
    f.n_channels = 1;
    f.min_channel_time = f.max_channel_time = f.t_switch = f.difs = f.slot_time = f.t_auth = f.t_assoc =
        Duration::zero();
    f.cw = 0;
    return TimingParams(f);
  }();

  const auto [lo0, hi0] = probe_time_bounds(zeros);
  expect("probe bounds N=1 zero (min)", lo0, Duration::zero());
  expect("probe bounds N=1 zero (max)", hi0, Duration::zero());
  const auto [lo11, hi11] = probe_time_bounds(timing(11));
  expect("probe bounds N=11 (min)", lo11, ms(77));
  expect("probe bounds N=11 (max)", hi11, ms(121));
  const auto [lo13, hi13] = probe_time_bounds(timing(13));
  expect("probe bounds N=13 (min)", lo13, ms(91));
  expect("probe bounds N=13 (max)", hi13, ms(143));

  expect("MinChannelTime bound zero", min_channel_time_bound(Duration::zero(), 0, us(9)), Duration::zero());
  expect("MinChannelTime bound 50us/31/20us", min_channel_time_bound(us(50), 31, us(20)), us(670));
  expect("MinChannelTime bound 28us/15/9us", min_channel_time_bound(us(28), 15, us(9)), us(163));

  expect("handover latency zero", handover_latency(zeros, Duration::zero()), Duration::zero());
  expect("handover latency probe 7ms", handover_latency(timing(11), ms(7)), ms(136));
  expect("handover latency probe 11ms", handover_latency(timing(11), ms(11)), ms(180));

  expect("sync-scan delay zero", syncscan_delay(Duration::zero(), Duration::zero()), Duration::zero());
  expect("sync-scan delay 5ms/11ms", syncscan_delay(ms(5), ms(11)), ms(21));
  expect("sync-scan delay 150us/100ms", syncscan_delay(us(150), ms(100)), us(100300));

  expect("pre-scan time zero", prescan_time(zeros, Duration::zero()), Duration::zero());
  expect("pre-scan time N=11", prescan_time(timing(11), ms(11)), ms(176));
  expect("pre-scan time N=13", prescan_time(timing(13), ms(11)), ms(208));

  expect("pre-scan period zero", prescan_period_alpha(zeros), Duration::zero());
  expect("pre-scan period N=11", prescan_period_alpha(timing(11)), ms(264));
  expect("pre-scan period N=32", prescan_period_alpha(timing(32)), ms(768));

  const auto prev = prevent_threshold(Dbm(-51.0), Dbm(-39.0));
  out.push_back({"preventive threshold (-51,-39)", prev.value() == -45.0, std::to_string(prev.value())});
  const auto prev2 = prevent_threshold(Dbm(-90.0), Dbm(-30.0));
  out.push_back({"preventive threshold (-90,-30)", prev2.value() == -60.0, std::to_string(prev2.value())});

  double worst = 0.0;
  for (double f : {2.412e9, 2.437e9, 2.462e9, 5.18e9})
    for (double d : {0.01, 0.7, 1.0, 3.3, 25.0, 60.0, 480.0}) {
      const double delta = (received_power(Dbm(20.0), 10.0 * d, f) - received_power(Dbm(20.0), d, f)) + 20.0;
      worst = std::max(worst, std::abs(delta));
    }
  out.push_back({"path-loss decade law", worst <= 1e-9, "max error " + std::to_string(worst) + " dB"});
  return out;
}

inline bool print_check(std::ostream& os, const std::vector<CheckResult>& results) {
  bool ok = true;
  for (const auto& r : results) {
    os << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.pass;
  }
  return ok;
}

}  // namespace handoff
