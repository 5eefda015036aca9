#include <gtest/gtest.h>

#include <set>

#include "handoff/pshp_fsm.hpp"
#include "handoff/schemes.hpp"

using namespace handoff;

namespace {

const Thresholds kT = Thresholds::from_prescan(Dbm(-51.0), Dbm(-45.0));

PshpInputs at(double rssi) {
  PshpInputs in;
  in.rssi = Dbm(rssi);
  return in;
}

TEST(PshpTransition, StandbyToPreHandoff) {
  EXPECT_EQ(pshp_transition(PshpState::Standby, PshpEvent::RssiSample, at(-46.0), kT).next, PshpState::PreHandoff);
  EXPECT_EQ(pshp_transition(PshpState::Standby, PshpEvent::RssiSample, at(-45.0), kT).next, PshpState::PreHandoff);
  EXPECT_EQ(pshp_transition(PshpState::Standby, PshpEvent::RssiSample, at(-44.9), kT).next, PshpState::Standby);
  EXPECT_EQ(pshp_transition(PshpState::Standby, PshpEvent::RssiSample, at(-51.0), kT).next,
            PshpState::UrgentHandover);
}

TEST(PshpTransition, PreHandoffToForm1WithBetterHead) {
  auto in = at(-47.0);
  in.form1_target = 3;
  const auto step = pshp_transition(PshpState::PreHandoff, PshpEvent::RssiSample, in, kT);
  EXPECT_EQ(step, (PshpStep{PshpState::HandoffForm1, PshpAction::Reassociate, 3}));
  EXPECT_TRUE(pshp_association_gate(Dbm(-44.0), Dbm(-47.0), kT));
}

TEST(PshpTransition, PreHandoffWithoutHeadReturnsToStandby) {
  EXPECT_EQ(pshp_transition(PshpState::PreHandoff, PshpEvent::RssiSample, at(-47.0), kT),
            (PshpStep{PshpState::Standby, PshpAction::None, {}}));
}

TEST(PshpTransition, UrgentWithEmptyListRunsFullScan) {
  EXPECT_EQ(pshp_transition(PshpState::UrgentHandover, PshpEvent::RssiSample, at(-55.0), kT),
            (PshpStep{PshpState::HandoffForm3, PshpAction::FullScan, {}}));
  auto in = at(-55.0);
  in.urgent_target = 2;
  EXPECT_EQ(pshp_transition(PshpState::UrgentHandover, PshpEvent::RssiSample, in, kT),
            (PshpStep{PshpState::HandoffForm2, PshpAction::Reassociate, 2}));
}

TEST(PshpTransition, UrgentDuringPrescanAborts) {
  auto in = at(-55.0);
  in.prescan_in_progress = true;
  EXPECT_EQ(pshp_transition(PshpState::UrgentHandover, PshpEvent::RssiSample, in, kT).action,
            PshpAction::AbortPrescan);
}

TEST(PshpTransition, AssociationOutcomes) {
  for (auto s : {PshpState::HandoffForm1, PshpState::HandoffForm2, PshpState::HandoffForm3})
    EXPECT_EQ(pshp_transition(s, PshpEvent::AssociationSuccess, at(-40.0), kT),
              (PshpStep{PshpState::Standby, PshpAction::ImmediatePrescan, {}}));
  EXPECT_EQ(pshp_transition(PshpState::HandoffForm1, PshpEvent::AssociationFailure, at(-47.0), kT),
            (PshpStep{PshpState::Standby, PshpAction::PurgeAndPrescan, {}}));
  EXPECT_EQ(pshp_transition(PshpState::HandoffForm2, PshpEvent::AssociationFailure, at(-55.0), kT).next,
            PshpState::HandoffForm3);
  EXPECT_EQ(pshp_transition(PshpState::HandoffForm3, PshpEvent::AssociationFailure, at(-55.0), kT).action,
            PshpAction::RetryScan);
}

TEST(PshpTransition, PrescanDueGating) {
  EXPECT_EQ(pshp_transition(PshpState::Standby, PshpEvent::PrescanDue, at(-46.0), kT).action,
            PshpAction::StartPrescan);
  EXPECT_EQ(pshp_transition(PshpState::Standby, PshpEvent::PrescanDue, at(-40.0), kT).action,
            PshpAction::DeferPrescan);
  auto busy = at(-46.0);
  busy.prescan_in_progress = true;
  EXPECT_EQ(pshp_transition(PshpState::Standby, PshpEvent::PrescanDue, busy, kT).action, PshpAction::Ignored);
}

TEST(PshpTransition, TotalOverEveryStateEventPair) {
  // Every pair yields a state from the enumeration, for inputs on each side of both thresholds.
  const std::set<PshpState> states(kAllPshpStates.begin(), kAllPshpStates.end());
  for (auto s : kAllPshpStates)
    for (auto e : kAllPshpEvents)
      for (double r : {-30.0, -45.0, -48.0, -51.0, -70.0})
        for (bool busy : {false, true})
          for (bool head : {false, true}) {
            auto in = at(r);
            in.prescan_in_progress = busy;
            if (head) in.form1_target = in.urgent_target = 1;
            const auto step = pshp_transition(s, e, in, kT);
            EXPECT_TRUE(states.count(step.next)) << to_string(s) << "/" << to_string(e);
            if (step.action == PshpAction::Ignored) {
              EXPECT_EQ(step.next, s);
            }
            if (step.action == PshpAction::Reassociate) {
              EXPECT_TRUE(step.target.has_value());
            }
          }
}

TEST(AssociationGate, Examples) {
  EXPECT_FALSE(pshp_association_gate(Dbm(-47.0), Dbm(-47.0), kT));
  EXPECT_TRUE(pshp_association_gate(Dbm(-44.0), Dbm(-47.0), kT));
  EXPECT_FALSE(pshp_association_gate(Dbm(-52.0), Dbm(-60.0), kT));
}

TEST(Apfh, SafeZoneNeverActs) {
  ApfhTracker tr;
  EXPECT_EQ(apfh_step(Zone::Safe, tr, kT).action, ApfhAction::None);
}

TEST(Apfh, TrackedNeighbourIsReassociatedDirectly) {
  ApfhTracker tr;
  EXPECT_EQ(apfh_step(Zone::Gray, tr, kT).action, ApfhAction::Track);
  tr.observe(std::vector<ApSample>{{4, Dbm(-47.0), SimTime{}}, {6, Dbm(-44.0), SimTime{}}});
  const auto d = apfh_step(Zone::Handover, tr, kT);
  EXPECT_EQ(d.action, ApfhAction::Reassociate);
  EXPECT_EQ(d.target, 6);
}

TEST(Apfh, NothingTrackedFallsBackToScan) {
  ApfhTracker tr;
  EXPECT_EQ(apfh_step(Zone::Handover, tr, kT).action, ApfhAction::FullScan);
  tr.observe(std::vector<ApSample>{{4, Dbm(-58.0), SimTime{}}});
  EXPECT_EQ(apfh_step(Zone::Handover, tr, kT).action, ApfhAction::FullScan);
}

// A row of APs 0-1-2-3 so 1, 2 and 3 all neighbour 0 only where linked.
NeighborContext star() {
  NeighborContext ctx(4, 32);
  ctx.add_neighbor(0, 1);
  ctx.add_neighbor(0, 2);
  ctx.add_neighbor(0, 3);
  return ctx;
}

DynamicApList listed(std::vector<std::pair<ApId, double>> v) {
  std::vector<ApSample> s;
  for (auto [a, r] : v) s.push_back({a, Dbm(r), SimTime{}});
  DynamicApList l;
  l.rebuild(s, std::nullopt);
  return l;
}

TEST(Form1Target, NoListedApBeatsCurrentMeansNoHandoff) {
  const auto ctx = star();
  const auto l = listed({{1, -48.0}, {2, -49.0}});
  EXPECT_FALSE(pshp_form1_target(l, 0, Dbm(-47.0), ctx, {}, kT));
  SelectionConfig sel{SelectionPolicy{}, ExtMode::NeighborCount};
  EXPECT_FALSE(pshp_form1_target(l, 0, Dbm(-47.0), ctx, sel, kT));
  EXPECT_EQ(pshp_form1_target(l, 0, Dbm(-48.5), ctx, {}, kT), 1);
}

TEST(Form2Target, PolicyPicksNonHeadArgmax) {
  auto ctx = star();
  for (int i = 0; i < 20; ++i) ctx.associate(1);  // head is crowded
  ctx.seed_history(0, 2, 5);
  const auto l = listed({{1, -46.0}, {2, -48.0}});
  EXPECT_EQ(pshp_urgent_target(l, 0, ctx, {}, kT), 1);
  SelectionConfig sel{SelectionPolicy{}, ExtMode::NeighborCount};
  sel.policy->threshold = kT.rssi_min();
  EXPECT_EQ(pshp_urgent_target(l, 0, ctx, sel, kT), 2);
}

TEST(ChooseAfterScan, RssiOnlyMatchesPlainRule) {
  const auto ctx = star();
  const std::vector<ApSample> r{{1, Dbm(-49.0), SimTime{}}, {3, Dbm(-47.0), SimTime{}}, {0, Dbm(-40.0), SimTime{}}};
  SelectionConfig sel{SelectionPolicy{}, ExtMode::NeighborCount};
  sel.policy->mode = SelectionMode::RssiOnly;
  EXPECT_EQ(choose_after_scan(r, ApId{0}, ctx, {}), 3);
  EXPECT_EQ(choose_after_scan(r, ApId{0}, ctx, sel), 3);
}

TEST(SchemeNames, RoundTrip) {
  for (auto k : {SchemeKind::StandardActive, SchemeKind::StandardPassive, SchemeKind::Apfh, SchemeKind::Pshp})
    EXPECT_EQ(parse_scheme(to_string(k)), k);
  EXPECT_FALSE(parse_scheme("802.11"));
}

}  // namespace
