#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "handoff/ap_selection.hpp"
#include "handoff/propagation.hpp"
#include "handoff/time.hpp"

namespace handoff {

struct ApSample {
  ApId ap = -1;
  Dbm rssi;
  SimTime sampled_at;

  bool operator==(const ApSample&) const = default;
};

/// Strongest nearby APs from recent pre-scans, best first.
///
/// Holds at most six entries (one per hexagonal neighbour), sorted by RSSI
/// descending with ties toward the lower AP id; one entry per AP.
class DynamicApList {
 public:
  static constexpr std::size_t kMaxEntries = 6;

  std::span<const ApSample> entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::optional<ApSample> head() const {
    if (entries_.empty()) return std::nullopt;
    return entries_.front();
  }

  /// Replaces the list with the strongest samples of a completed sweep.
  void rebuild(std::span<const ApSample> samples, std::optional<ApId> exclude) {
    entries_.clear();
    merge(samples, exclude);
  }

  /// Upserts fresh samples (newer sample wins per AP) and re-trims to six.
  void merge(std::span<const ApSample> samples, std::optional<ApId> exclude) {
    for (const auto& s : samples) {
      if (exclude && s.ap == *exclude) continue;
      auto it = std::find_if(entries_.begin(), entries_.end(), [&](const ApSample& e) { return e.ap == s.ap; });
      if (it == entries_.end()) {
        entries_.push_back(s);
      } else if (s.sampled_at >= it->sampled_at) {
        *it = s;
      }
    }
    normalize();
  }

  /// Drops entries sampled more than `max_age` before `now`.
  void purge_stale(SimTime now, Duration max_age) {
    std::erase_if(entries_, [&](const ApSample& e) { return e.sampled_at < now && now - e.sampled_at > max_age; });
  }

  void purge() { entries_.clear(); }

  void remove(ApId ap) {
    std::erase_if(entries_, [&](const ApSample& e) { return e.ap == ap; });
  }

  bool invariant_holds() const {
    if (entries_.size() > kMaxEntries) return false;
    for (std::size_t i = 1; i < entries_.size(); ++i)
      if (!before(entries_[i - 1], entries_[i])) return false;
    return true;
  }

 private:
  static bool before(const ApSample& a, const ApSample& b) {
    if (a.rssi != b.rssi) return a.rssi > b.rssi;
    return a.ap < b.ap;
  }
  void normalize() {
    std::sort(entries_.begin(), entries_.end(), before);
    if (entries_.size() > kMaxEntries) entries_.resize(kMaxEntries);
  }

  std::vector<ApSample> entries_;
};

}  // namespace handoff
