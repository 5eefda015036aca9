#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "handoff/engine.hpp"
#include "handoff/replay.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

using namespace handoff;

namespace {

TEST(EventQueue, OrdersByTimeThenInsertion) {
  EventQueue<int> q;
  q.push(SimTime::at_micros(5), 1);
  q.push(SimTime::at_micros(2), 2);
  q.push(SimTime::at_micros(5), 3);
  q.push(SimTime::at_micros(2), 4);
  std::vector<int> order;
  while (!q.empty()) order.push_back(q.pop().second);
  EXPECT_EQ(order, (std::vector<int>{2, 4, 1, 3}));
}

TEST(LatencyStats, MedianAndP95) {
  const auto s = latency_stats({4, 1, 3, 2});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_EQ(s.p95, 4);
  std::vector<std::int64_t> v(20);
  std::iota(v.begin(), v.end(), 1);
  EXPECT_EQ(latency_stats(v).p95, 19);
  EXPECT_EQ(latency_stats({}).p95, 0);
}

Scenario single_static(SchemeKind scheme) {
  Scenario s;
  s.ap_count = 1;
  s.stations = 1;
  s.mobility = MobilityModel::Static;
  s.station_positions = {{5.0, 5.0}};
  s.load = 0.0;
  s.scheme = scheme;
  return s;
}

TEST(Run, StationaryInSafeZoneNeverHandsOff) {
  for (auto k : {SchemeKind::StandardActive, SchemeKind::Apfh, SchemeKind::Pshp}) {
    const auto m = run(single_static(k));
    EXPECT_EQ(m.handoff_count(), 0);
    EXPECT_EQ(m.dropped(), 0);
    EXPECT_EQ(m.emitted, 500);
    EXPECT_TRUE(m.conserves());
  }
}

TEST(Run, ZeroLoadInterFrameDelayIsConstant) {
  auto s = single_static(SchemeKind::StandardActive);
  s.contention = fixtures::flat_contention();
  const auto m = run(s);
  ASSERT_EQ(m.inter_frame_us.size(), 1u);
  ASSERT_GT(m.inter_frame_us[0].size(), 400u);
  for (auto d : m.inter_frame_us[0]) ASSERT_EQ(d, 20'000);
}

TEST(Run, InvalidScenarioRejectedUpFront) {
  Scenario s;
  s.load = 1.5;
  EXPECT_THROW(Simulator{s}, std::invalid_argument);
  s = Scenario{};
  s.duration = Duration::zero();
  EXPECT_THROW(Simulator{s}, std::invalid_argument);
}

TEST(Run, RunTwiceIsAnError) {
  Simulator sim(single_static(SchemeKind::Pshp));
  sim.run();
  EXPECT_THROW(sim.run(), std::logic_error);
}

TEST(TwoApWalk, PshpMakesOneFormOneHandoffAtReassociationCost) {
  const auto s = fixtures::two_ap_walk(SchemeKind::Pshp);
  const auto m = run(s);
  ASSERT_EQ(m.handoff_count(), 1);
  const auto& h = m.handoffs[0];
  EXPECT_EQ(h.form, HandoffForm::Form1);
  EXPECT_EQ(h.from, 0);
  EXPECT_EQ(h.to, 1);
  EXPECT_EQ(h.latency, Duration::millis(2));  // re-association: two frames at 1 ms
  EXPECT_EQ(h.breakdown.frames, h.latency);
  // fired between the pre-scan and handoff threshold crossings
  EXPECT_GE(h.trigger_time.micros(), fixtures::first_tick_below(-45.0, s));
  EXPECT_LT(h.trigger_time.micros(), fixtures::first_tick_below(-51.0, s));
  ASSERT_TRUE(h.listed_rssi);
  EXPECT_GT(*h.listed_rssi, h.rssi_at_trigger);
}

TEST(TwoApWalk, StandardScanCostsEveryChannel) {
  const auto s = fixtures::two_ap_walk(SchemeKind::StandardActive);
  const auto m = run(s);
  ASSERT_EQ(m.handoff_count(), 1);
  const auto& h = m.handoffs[0];
  EXPECT_EQ(h.trigger_time.micros(), fixtures::first_tick_below(-51.0, s));
  // both APs answer on their own channel (0 and 1); four auth/assoc frames at 1 ms
  std::vector<bool> busy(11, false);
  busy[0] = busy[1] = true;
  EXPECT_EQ(h.latency.count(), oracle::active_scan_us(11, busy, 5000, 7000, 11000) + 4000);
  EXPECT_GE(h.latency, Duration::millis(77 + 4));
}

TEST(TwoApWalk, TraceReplayReconciles) {
  for (auto k : {SchemeKind::Pshp, SchemeKind::StandardActive, SchemeKind::Apfh}) {
    std::stringstream trace;
    const auto m = run(fixtures::two_ap_walk(k), &trace);
    const auto rep = replay_trace(trace);
    const auto diffs = reconcile(rep, m);
    EXPECT_TRUE(diffs.empty()) << to_string(k) << ": " << (diffs.empty() ? "" : diffs.front());
  }
}

TEST(TwoApWalk, StandardIsSilentDuringItsHandoff) {
  std::stringstream trace;
  const auto m = run(fixtures::two_ap_walk(SchemeKind::StandardActive), &trace);
  ASSERT_EQ(m.handoff_count(), 1);
  const auto& h = m.handoffs[0];
  std::string line;
  while (std::getline(trace, line)) {
    const auto r = parse_trace_line(line);
    if (r.time_us > h.trigger_time.micros() && r.time_us < h.complete_time.micros()) {
      EXPECT_NE(r.kind, "deliver") << line;
    }
  }
}

TEST(TwoApWalk, ApfhReassociatesWithoutDiscovery) {
  const auto m = run(fixtures::two_ap_walk(SchemeKind::Apfh));
  ASSERT_EQ(m.handoff_count(), 1);
  EXPECT_EQ(m.handoffs[0].latency, Duration::millis(4));
}

TEST(Run, PshpReceivesNothingDirectlyWhilePrescanning) {
  auto s = fixtures::hex_sweep(SchemeKind::Pshp);
  s.stations = 20;
  s.duration = Duration::seconds(3);
  std::stringstream trace;
  run(s, &trace);
  std::map<std::int64_t, bool> in_psm;
  std::string line;
  std::int64_t checked = 0;
  while (std::getline(trace, line)) {
    const auto r = parse_trace_line(line);
    if (r.kind == "psm_enter") in_psm[r.ms] = true;
    else if (r.kind == "prescan_end" || r.kind == "handoff_trigger") in_psm[r.ms] = false;
    else if (r.kind == "deliver" || r.kind == "deadline_drop") {
      EXPECT_FALSE(in_psm[r.ms]) << line;
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(Run, HandoffAccountingAndHistoryRows) {
  for (auto k : {SchemeKind::StandardActive, SchemeKind::StandardPassive, SchemeKind::Apfh, SchemeKind::Pshp}) {
    auto s = fixtures::hex_sweep(k);
    s.stations = 40;
    s.duration = Duration::seconds(5);
    s.history_seed = {{0, 1, 3}, {6, 7, 2}};
    const auto m = run(s);
    EXPECT_TRUE(m.conserves());
    std::vector<std::int64_t> rows(25, 0);
    rows[0] += 3;
    rows[6] += 2;
    for (const auto& h : m.handoffs) {
      EXPECT_EQ(h.latency, h.complete_time - h.trigger_time);
      EXPECT_EQ(h.latency, h.breakdown.total());
      if (h.form == HandoffForm::Form1) {
        ASSERT_TRUE(h.listed_rssi);
        EXPECT_GT(*h.listed_rssi, h.rssi_at_trigger);
      }
      if (h.form == HandoffForm::Form1 || h.form == HandoffForm::Form2) {
        EXPECT_EQ(h.breakdown.switching, Duration::zero());
        EXPECT_EQ(h.breakdown.dwell, Duration::zero());
      }
      ++rows[static_cast<std::size_t>(h.from)];
    }
    EXPECT_EQ(m.history_row_totals, rows) << to_string(k);
    for (const auto& c : m.per_station) EXPECT_TRUE(c.conserves());
  }
}

TEST(Run, StandardWithRssiOnlyIsDecisionEquivalent) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto s = fixtures::hex_sweep(SchemeKind::StandardActive);
    s.stations = 10;
    s.duration = Duration::seconds(2);
    s.seed = seed;
    const auto plain = run(s);
    s.selection.policy = SelectionPolicy{};
    s.selection.policy->mode = SelectionMode::RssiOnly;
    const auto rssi_only = run(s);
    ASSERT_EQ(plain.handoffs, rssi_only.handoffs) << "seed " << seed;
    ASSERT_EQ(plain.event_hash, rssi_only.event_hash) << "seed " << seed;
  }
}

TEST(Run, RepeatedRunsAreBitIdentical) {
  auto s = fixtures::hex_sweep(SchemeKind::Pshp);
  s.stations = 30;
  s.duration = Duration::seconds(3);
  EXPECT_EQ(run(s), run(s));
  auto t = s;
  t.seed = 2;
  EXPECT_NE(run(s).event_hash, run(t).event_hash);
}

TEST(Sweep, EmptyLoadsGiveEmptyTable) {
  EXPECT_TRUE(sweep(Scenario{}, {}, {1, 2}).empty());
  EXPECT_THROW(sweep(Scenario{}, {1.2}, {1}), std::invalid_argument);
}

TEST(Sweep, PshpBeatsStandardOnPairedSeeds) {
  auto p = fixtures::hex_sweep(SchemeKind::Pshp);
  p.duration = Duration::seconds(5);
  auto st = p;
  st.scheme = SchemeKind::StandardActive;
  std::vector<std::uint64_t> seeds(10);
  std::iota(seeds.begin(), seeds.end(), 1);
  const auto a = aggregate(sweep(p, {0.5}, seeds));
  const auto b = aggregate(sweep(st, {0.5}, seeds));
  ASSERT_EQ(a.size(), 1u);
  EXPECT_LT(a[0].mean_latency_us, b[0].mean_latency_us);
  EXPECT_NEAR(a[0].form1_fraction + a[0].form2_fraction + a[0].form3_fraction + a[0].baseline_fraction, 1.0, 1e-12);
  EXPECT_NEAR(b[0].baseline_fraction, 1.0, 1e-12);
}

TEST(Sweep, ResultIndependentOfThreadCount) {
  auto s = fixtures::hex_sweep(SchemeKind::Pshp);
  s.stations = 20;
  s.duration = Duration::seconds(2);
  const auto one = sweep(s, {0.3, 0.1}, {4, 2}, 1);
  const auto many = sweep(s, {0.3, 0.1}, {4, 2}, 3);
  ASSERT_EQ(one.size(), 4u);
  EXPECT_EQ(one[0].load, 0.1);
  EXPECT_EQ(one[0].seed, 2u);
  for (std::size_t i = 0; i < one.size(); ++i) EXPECT_EQ(one[i].ledger, many[i].ledger);
}

}  // namespace
