#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "handoff/propagation.hpp"

namespace handoff {

using ApId = std::int32_t;

/// How EXT_i is counted for a candidate.
enum class ExtMode {
  NeighborCount,  // |N(candidate)|
  TwoHopOnly,     // N(candidate) minus the current AP and its direct neighbours
};

/// Network-side context for next-AP selection: the neighbour graph, the
/// directional handoff history O[i][k] and per-AP association counts.
class NeighborContext {
 public:
  NeighborContext() = default;
  explicit NeighborContext(std::size_t n_aps, std::int64_t capacity = 32)
      : n_(n_aps), neighbors_(n_aps), history_(n_aps * n_aps, 0), assoc_(n_aps, 0), capacity_(capacity) {
    if (capacity < 1) throw std::invalid_argument("AP capacity must be >= 1");
  }

  std::size_t size() const { return n_; }
  std::int64_t capacity() const { return capacity_; }

  void add_neighbor(ApId a, ApId b) {
    check(a);
    check(b);
    if (a == b) throw std::invalid_argument("an AP is not its own neighbour");
    insert_sorted(neighbors_[a], b);
    insert_sorted(neighbors_[b], a);
  }

  /// Links every pair of APs closer than `radius` meters.
  static NeighborContext from_positions(std::span<const Position> aps, double radius, std::int64_t capacity) {
    NeighborContext ctx(aps.size(), capacity);
    for (std::size_t i = 0; i < aps.size(); ++i)
      for (std::size_t k = i + 1; k < aps.size(); ++k)
        if (distance(aps[i], aps[k]) <= radius) ctx.add_neighbor(static_cast<ApId>(i), static_cast<ApId>(k));
    return ctx;
  }

  const std::vector<ApId>& neighbors(ApId a) const {
    check(a);
    return neighbors_[a];
  }
  bool are_neighbors(ApId a, ApId b) const {
    const auto& n = neighbors(a);
    return std::binary_search(n.begin(), n.end(), b);
  }

  std::int64_t history(ApId from, ApId to) const {
    check(from);
    check(to);
    return history_[index(from, to)];
  }
  /// Pre-loads O[from][to], e.g. to encode journeys made before the run started.
  void seed_history(ApId from, ApId to, std::int64_t count) {
    check(from);
    check(to);
    if (count < 0) throw std::invalid_argument("history counts are non-negative");
    history_[index(from, to)] = count;
  }
  std::int64_t history_row_total(ApId from) const {
    check(from);
    std::int64_t t = 0;
    for (std::size_t k = 0; k < n_; ++k) t += history_[index(from, static_cast<ApId>(k))];
    return t;
  }

  std::int64_t associated(ApId a) const {
    check(a);
    return assoc_[a];
  }
  bool has_room(ApId a) const { return associated(a) < capacity_; }

  void associate(ApId a) {
    check(a);
    ++assoc_[a];
  }
  void disassociate(ApId a) {
    check(a);
    if (assoc_[a] == 0) throw std::logic_error("disassociate from an AP with no stations");
    --assoc_[a];
  }

  /// A completed handoff: O[from][to] += 1 and one station moves between the APs.
  void record_handoff(ApId from, ApId to) {
    check(from);
    check(to);
    ++history_[index(from, to)];
    disassociate(from);
    associate(to);
  }

 private:
  void check(ApId a) const {
    if (a < 0 || static_cast<std::size_t>(a) >= n_) throw std::out_of_range("unknown AP id " + std::to_string(a));
  }
  std::size_t index(ApId from, ApId to) const { return static_cast<std::size_t>(from) * n_ + static_cast<std::size_t>(to); }
  static void insert_sorted(std::vector<ApId>& v, ApId x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) v.insert(it, x);
  }

  std::size_t n_ = 0;
  std::vector<std::vector<ApId>> neighbors_;
  std::vector<std::int64_t> history_;
  std::vector<std::int64_t> assoc_;
  std::int64_t capacity_ = 32;
};

/// Fields a candidate advertises in its beacon / probe response.
struct CandidateFeatures {
  ApId ap = -1;
  std::int64_t ms_count = 0;  // stations associated with the candidate
  std::int64_t cnx = 0;       // past handoffs current -> candidate
  std::int64_t ext = 0;       // candidate's neighbourhood extent
  Dbm rssi;

  bool operator==(const CandidateFeatures&) const = default;
};

/// Features of `candidate` as seen from `current`; candidates outside N(current) are rejected.
inline CandidateFeatures candidate_features(const NeighborContext& ctx, ApId current, ApId candidate, Dbm rssi,
                                            ExtMode ext_mode = ExtMode::NeighborCount) {
  if (!ctx.are_neighbors(current, candidate))
    throw std::invalid_argument("AP " + std::to_string(candidate) + " is not a neighbour of AP " +
                                std::to_string(current));
  CandidateFeatures f;
  f.ap = candidate;
  f.ms_count = ctx.associated(candidate);
  f.cnx = ctx.history(current, candidate);
  const auto& ext = ctx.neighbors(candidate);
  if (ext_mode == ExtMode::NeighborCount) {
    f.ext = static_cast<std::int64_t>(ext.size());
  } else {
    f.ext = std::count_if(ext.begin(), ext.end(),
                          [&](ApId k) { return k != current && !ctx.are_neighbors(current, k); });
  }
  f.rssi = rssi;
  return f;
}

enum class SelectionMode { WeightedSum, Lexicographic, RssiOnly };

inline const char* to_string(SelectionMode m) {
  switch (m) {
    case SelectionMode::WeightedSum: return "weighted_sum";
    case SelectionMode::Lexicographic: return "lexicographic";
    case SelectionMode::RssiOnly: return "rssi_only";
  }
  return "?";
}

inline std::optional<SelectionMode> parse_selection_mode(std::string_view s) {
  if (s == "weighted_sum") return SelectionMode::WeightedSum;
  if (s == "lexicographic") return SelectionMode::Lexicographic;
  if (s == "rssi_only") return SelectionMode::RssiOnly;
  return std::nullopt;
}

struct SelectionPolicy {
  SelectionMode mode = SelectionMode::WeightedSum;
  double w_rssi = 1.0;
  double w_ext = 1.0;
  double w_cnx = 1.0;
  double w_load = 1.0;
  Dbm threshold = Dbm(-51.0);  // candidates must be strictly stronger
  std::int64_t capacity = 32;  // candidates must carry fewer stations

  void validate() const {
    for (double w : {w_rssi, w_ext, w_cnx, w_load})
      if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("selection weights must be finite and >= 0");
    if (mode == SelectionMode::WeightedSum && w_rssi + w_ext + w_cnx + w_load <= 0.0)
      throw std::invalid_argument("weighted_sum needs at least one positive weight");
    if (capacity < 1) throw std::invalid_argument("capacity must be >= 1");
  }
};

inline bool is_feasible(const CandidateFeatures& c, const SelectionPolicy& p) {
  return c.rssi > p.threshold && c.ms_count < p.capacity;
}

namespace detail {

struct MinMax {
  double lo = 0.0;
  double hi = 0.0;
  double operator()(double v) const { return hi > lo ? (v - lo) / (hi - lo) : 0.0; }
};

template <typename Get>
MinMax span_of(std::span<const CandidateFeatures* const> set, Get get) {
  MinMax m{get(*set.front()), get(*set.front())};
  for (const auto* c : set) {
    m.lo = std::min(m.lo, get(*c));
    m.hi = std::max(m.hi, get(*c));
  }
  return m;
}

}  // namespace detail

/// Weighted-sum score of `c` with min-max normalisation over `feasible`.
inline double weighted_score(const CandidateFeatures& c, std::span<const CandidateFeatures* const> feasible,
                             const SelectionPolicy& p) {
  const auto n_rssi = detail::span_of(feasible, [](const auto& x) { return x.rssi.value(); });
  const auto n_ext = detail::span_of(feasible, [](const auto& x) { return static_cast<double>(x.ext); });
  const auto n_cnx = detail::span_of(feasible, [](const auto& x) { return static_cast<double>(x.cnx); });
  const auto n_load = detail::span_of(feasible, [](const auto& x) { return static_cast<double>(x.ms_count); });
  return p.w_rssi * n_rssi(c.rssi.value()) + p.w_ext * n_ext(static_cast<double>(c.ext)) +
         p.w_cnx * n_cnx(static_cast<double>(c.cnx)) - p.w_load * n_load(static_cast<double>(c.ms_count));
}

/// Picks the next AP among `candidates`, or nothing when no candidate is feasible.
///
/// A candidate is feasible when its RSSI is strictly above `policy.threshold`
/// (and above `must_beat` when given) and it carries fewer than `capacity`
/// stations. Every mode breaks remaining ties toward the lowest AP id.
inline std::optional<ApId> select_next_ap(std::span<const CandidateFeatures> candidates,
                                          std::optional<Dbm> must_beat, const SelectionPolicy& policy) {
  std::vector<const CandidateFeatures*> feasible;
  for (const auto& c : candidates)
    if (is_feasible(c, policy) && (!must_beat || c.rssi > *must_beat)) feasible.push_back(&c);
  if (feasible.empty()) return std::nullopt;

  const CandidateFeatures* best = nullptr;
  switch (policy.mode) {
    case SelectionMode::WeightedSum: {
      double best_score = 0.0;
      for (const auto* c : feasible) {
        const double s = weighted_score(*c, feasible, policy);
        if (!best || s > best_score || (s == best_score && c->ap < best->ap)) {
          best = c;
          best_score = s;
        }
      }
      break;
    }
    case SelectionMode::Lexicographic: {
      auto better = [](const CandidateFeatures& a, const CandidateFeatures& b) {
        if (a.rssi != b.rssi) return a.rssi > b.rssi;
        if (a.ext != b.ext) return a.ext > b.ext;
        if (a.cnx != b.cnx) return a.cnx > b.cnx;
        if (a.ms_count != b.ms_count) return a.ms_count < b.ms_count;
        return a.ap < b.ap;
      };
      for (const auto* c : feasible)
        if (!best || better(*c, *best)) best = c;
      break;
    }
    case SelectionMode::RssiOnly:
      for (const auto* c : feasible)
        if (!best || c->rssi > best->rssi || (c->rssi == best->rssi && c->ap < best->ap)) best = c;
      break;
  }
  return best->ap;
}

}  // namespace handoff
