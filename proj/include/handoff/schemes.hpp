#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "handoff/ap_selection.hpp"
#include "handoff/dynamic_ap_list.hpp"
#include "handoff/latency_model.hpp"
#include "handoff/propagation.hpp"
#include "handoff/pshp_fsm.hpp"

namespace handoff {

enum class SchemeKind { StandardActive, StandardPassive, Apfh, Pshp };

inline const char* to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::StandardActive: return "standard_active";
    case SchemeKind::StandardPassive: return "standard_passive";
    case SchemeKind::Apfh: return "apfh";
    case SchemeKind::Pshp: return "pshp";
  }
  return "?";
}

inline std::optional<SchemeKind> parse_scheme(std::string_view s) {
  if (s == "standard_active") return SchemeKind::StandardActive;
  if (s == "standard_passive") return SchemeKind::StandardPassive;
  if (s == "apfh") return SchemeKind::Apfh;
  if (s == "pshp") return SchemeKind::Pshp;
  return std::nullopt;
}

enum class HandoffForm { Form1, Form2, Form3, Baseline };

inline const char* to_string(HandoffForm f) {
  switch (f) {
    case HandoffForm::Form1: return "form1";
    case HandoffForm::Form2: return "form2";
    case HandoffForm::Form3: return "form3";
    case HandoffForm::Baseline: return "baseline";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Scans

/// APs heard on `channel` (0-based) once the radio has settled there;
/// `elapsed` is the time since the scan began.
using ChannelProbe = std::function<std::vector<ApSample>(std::int64_t channel, Duration elapsed)>;

struct ScanOutcome {
  std::vector<ApSample> responders;
  Duration elapsed;
  std::int64_t busy_channels = 0;
};

/// Active-scan dwell: MinChannelTime, extended to MaxChannelTime once anything answered.
inline Duration active_channel_dwell(const TimingParams& p, bool any_responder) {
  return any_responder ? p.max_channel_time() : p.min_channel_time();
}

/// Probe every channel: switch, wait MinChannelTime, extend to MaxChannelTime
/// when a probe response arrived. Authentication is not included.
inline ScanOutcome standard_active_scan(const TimingParams& p, const ChannelProbe& probe) {
  ScanOutcome out;
  for (std::int64_t ch = 0; ch < p.n_channels(); ++ch) {
    out.elapsed += p.t_switch();
    auto heard = probe(ch, out.elapsed);
    out.elapsed += active_channel_dwell(p, !heard.empty());
    if (!heard.empty()) ++out.busy_channels;
    out.responders.insert(out.responders.end(), heard.begin(), heard.end());
  }
  return out;
}

/// Listen one beacon interval on every channel. The directed probe of the
/// chosen AP and authentication are not included.
inline ScanOutcome standard_passive_scan(const TimingParams& p, const ChannelProbe& probe) {
  ScanOutcome out;
  for (std::int64_t ch = 0; ch < p.n_channels(); ++ch) {
    out.elapsed += p.t_switch();
    auto heard = probe(ch, out.elapsed);
    out.elapsed += p.beacon_interval();
    if (!heard.empty()) ++out.busy_channels;
    out.responders.insert(out.responders.end(), heard.begin(), heard.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Next-AP choice, with or without the context-aware heuristic attached

struct SelectionConfig {
  std::optional<SelectionPolicy> policy;  // empty: plain RSSI rule of the base scheme
  ExtMode ext_mode = ExtMode::NeighborCount;
};

namespace detail {

inline std::optional<ApId> strongest(std::span<const ApSample> samples, std::optional<ApId> exclude) {
  const ApSample* best = nullptr;
  for (const auto& s : samples) {
    if (exclude && s.ap == *exclude) continue;
    if (!best || s.rssi > best->rssi || (s.rssi == best->rssi && s.ap < best->ap)) best = &s;
  }
  if (!best) return std::nullopt;
  return best->ap;
}

inline std::vector<CandidateFeatures> neighbour_candidates(std::span<const ApSample> samples, ApId current,
                                                           const NeighborContext& ctx, ExtMode ext_mode) {
  std::vector<CandidateFeatures> out;
  for (const auto& s : samples) {
    if (s.ap == current || !ctx.are_neighbors(current, s.ap)) continue;
    out.push_back(candidate_features(ctx, current, s.ap, s.rssi, ext_mode));
  }
  return out;
}

}  // namespace detail

/// Target after a full scan. With a policy, candidates are the responding
/// neighbours of `current`; when none is feasible the plain strongest-responder
/// rule applies so the station is not stranded.
inline std::optional<ApId> choose_after_scan(std::span<const ApSample> responders, std::optional<ApId> current,
                                             const NeighborContext& ctx, const SelectionConfig& sel) {
  if (sel.policy && current) {
    const auto cands = detail::neighbour_candidates(responders, *current, ctx, sel.ext_mode);
    if (auto pick = select_next_ap(cands, std::nullopt, *sel.policy)) return pick;
  }
  return detail::strongest(responders, current);
}

/// Form-1 target: a listed AP with RSSI strictly above the current link (and the handoff threshold).
inline std::optional<ApId> pshp_form1_target(const DynamicApList& list, ApId current, Dbm current_rssi,
                                             const NeighborContext& ctx, const SelectionConfig& sel,
                                             const Thresholds& t) {
  if (sel.policy) {
    const auto cands = detail::neighbour_candidates(list.entries(), current, ctx, sel.ext_mode);
    return select_next_ap(cands, current_rssi, *sel.policy);
  }
  const auto head = list.head();
  if (head && head->ap != current && pshp_association_gate(head->rssi, current_rssi, t)) return head->ap;
  return std::nullopt;
}

/// Form-2 target: a listed AP above the handoff threshold.
inline std::optional<ApId> pshp_urgent_target(const DynamicApList& list, ApId current, const NeighborContext& ctx,
                                              const SelectionConfig& sel, const Thresholds& t) {
  if (sel.policy) {
    const auto cands = detail::neighbour_candidates(list.entries(), current, ctx, sel.ext_mode);
    return select_next_ap(cands, std::nullopt, *sel.policy);
  }
  const auto head = list.head();
  if (head && head->ap != current && head->rssi > t.rssi_min()) return head->ap;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// APFH: safe / gray / handover zones with a pre-selected next AP

/// Best neighbour seen while crossing the gray zone.
class ApfhTracker {
 public:
  void observe(std::span<const ApSample> samples) {
    for (const auto& s : samples) {
      auto it = std::find_if(seen_.begin(), seen_.end(), [&](const ApSample& e) { return e.ap == s.ap; });
      if (it == seen_.end()) seen_.push_back(s);
      else *it = s;
    }
  }
  std::optional<ApSample> best() const {
    const ApSample* b = nullptr;
    for (const auto& s : seen_)
      if (!b || s.rssi > b->rssi || (s.rssi == b->rssi && s.ap < b->ap)) b = &s;
    if (!b) return std::nullopt;
    return *b;
  }
  void reset() { seen_.clear(); }
  bool empty() const { return seen_.empty(); }

 private:
  std::vector<ApSample> seen_;
};

enum class ApfhAction { None, Track, Reassociate, FullScan };

struct ApfhDecision {
  ApfhAction action = ApfhAction::None;
  std::optional<ApId> target;
};

/// Zone-driven APFH decision for one RSSI sample.
inline ApfhDecision apfh_step(Zone zone, const ApfhTracker& tracker, const Thresholds& t) {
  switch (zone) {
    case Zone::Safe: return {ApfhAction::None, {}};
    case Zone::Gray: return {ApfhAction::Track, {}};
    case Zone::Handover: {
      const auto best = tracker.best();
      if (best && best->rssi > t.rssi_min()) return {ApfhAction::Reassociate, best->ap};
      return {ApfhAction::FullScan, {}};
    }
  }
  return {};
}

}  // namespace handoff
