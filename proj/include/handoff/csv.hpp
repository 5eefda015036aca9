#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "handoff/engine.hpp"

namespace handoff {

inline constexpr int kCsvVersion = 1;

inline constexpr std::string_view kCsvHeader =
    "csv_version,run_id,seed,load,scheme,selection,handoffs,form1,form2,form3,baseline,"
    "mean_latency_us,median_latency_us,p95_latency_us,loss_probability,emitted,delivered,dropped";

/// Shortest round-trip text for `v`, independent of the global locale.
inline std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline std::string format_int(std::int64_t v) {
  char buf[24];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline std::string selection_label(const SelectionConfig& sel) {
  return sel.policy ? to_string(sel.policy->mode) : "none";
}

/// One CSV line (no newline) for a finished run.
inline std::string csv_row(std::int64_t run_id, const SweepRun& r, SchemeKind scheme, const SelectionConfig& sel) {
  const auto& m = r.ledger;
  const auto st = latency_stats(m.latencies_us());
  std::string out;
  auto field = [&](std::string_view s) {
    if (!out.empty()) out += ',';
    out += s;
  };
  field(format_int(kCsvVersion));
  field(format_int(run_id));
  field(format_int(static_cast<std::int64_t>(r.seed)));
  field(format_double(r.load));
  field(to_string(scheme));
  field(selection_label(sel));
  field(format_int(m.handoff_count()));
  field(format_int(m.count(HandoffForm::Form1)));
  field(format_int(m.count(HandoffForm::Form2)));
  field(format_int(m.count(HandoffForm::Form3)));
  field(format_int(m.count(HandoffForm::Baseline)));
  field(format_int(std::llround(st.mean)));
  field(format_int(std::llround(st.median)));
  field(format_int(st.p95));
  field(format_double(m.loss_probability()));
  field(format_int(m.emitted));
  field(format_int(m.delivered));
  field(format_int(m.dropped()));
  return out;
}

/// Header plus one row per run; `runs` must already be sorted by (load, seed).
inline void write_csv(std::ostream& os, const std::vector<SweepRun>& runs, SchemeKind scheme,
                      const SelectionConfig& sel) {
  os << kCsvHeader << '\n';
  std::int64_t id = 0;
  for (const auto& r : runs) os << csv_row(id++, r, scheme, sel) << '\n';
  if (!os) throw std::ios_base::failure("CSV write failed");
}

}  // namespace handoff
