#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "handoff/engine.hpp"
#include "handoff/event_log.hpp"

namespace handoff {

struct ReplayedHandoff {
  std::int64_t ms = -1;
  std::int64_t from = -1;
  std::int64_t to = -1;
  std::string form;
  std::int64_t trigger_us = 0;
  std::int64_t complete_us = 0;
  std::int64_t logged_latency_us = 0;
  std::int64_t parts_us = 0;  // switch + dwell + frames + wait + backoff seen in the log
};

/// Counters and handoffs rebuilt from a trace without touching the simulator.
struct ReplaySummary {
  std::int64_t lines = 0;
  std::int64_t emitted = 0;
  std::int64_t delivered = 0;
  std::int64_t deadline_dropped = 0;
  std::int64_t handoff_lost = 0;
  std::int64_t buffer_dropped = 0;
  std::int64_t last_time_us = 0;
  bool chronological = true;
  std::vector<ReplayedHandoff> handoffs;
};

inline ReplaySummary replay_trace(std::istream& in) {
  struct Open {
    std::int64_t trigger = 0;
    std::int64_t from = -1;
    std::int64_t parts = 0;
  };
  ReplaySummary out;
  std::map<std::int64_t, Open> open;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto r = parse_trace_line(line);
    ++out.lines;
    if (r.time_us < out.last_time_us) out.chronological = false;
    out.last_time_us = r.time_us;
    const auto& k = r.kind;
    if (k == "emit") ++out.emitted;
    else if (k == "deliver") ++out.delivered;
    else if (k == "deadline_drop") ++out.deadline_dropped;
    else if (k == "handoff_loss") ++out.handoff_lost;
    else if (k == "overflow_drop") ++out.buffer_dropped;
    else if (k == "handoff_trigger") open[r.ms] = Open{r.num("trigger"), r.ap, 0};
    else if (k == "wait" || k == "backoff") {
      if (auto it = open.find(r.ms); it != open.end()) it->second.parts += r.num("us");
    } else if (k == "scan_channel") {
      if (auto it = open.find(r.ms); it != open.end()) it->second.parts += r.num("switch") + r.num("dwell");
    } else if (k == "frame") {
      if (auto it = open.find(r.ms); it != open.end()) it->second.parts += r.num("delay");
    } else if (k == "handoff_complete") {
      auto it = open.find(r.ms);
      if (it == open.end()) throw std::runtime_error("handoff_complete without a trigger: " + line);
      ReplayedHandoff h;
      h.ms = r.ms;
      h.from = it->second.from;
      h.to = r.ap;
      h.form = r.text("form");
      h.trigger_us = it->second.trigger;
      h.complete_us = r.time_us;
      h.logged_latency_us = r.num("latency");
      h.parts_us = it->second.parts;
      out.handoffs.push_back(h);
      open.erase(it);
    }
  }
  return out;
}

/// Differences between a replayed trace and the ledger of the same run; empty when they agree.
inline std::vector<std::string> reconcile(const ReplaySummary& rep, const MetricsLedger& m) {
  std::vector<std::string> diffs;
  auto check = [&](const char* what, std::int64_t a, std::int64_t b) {
    if (a != b) diffs.push_back(std::string(what) + ": trace " + std::to_string(a) + " vs ledger " + std::to_string(b));
  };
  if (!rep.chronological) diffs.emplace_back("trace is not in time order");
  check("emitted", rep.emitted, m.emitted);
  check("delivered", rep.delivered, m.delivered);
  check("deadline drops", rep.deadline_dropped, m.deadline_dropped);
  check("handoff losses", rep.handoff_lost, m.handoff_lost);
  check("buffer drops", rep.buffer_dropped, m.buffer_dropped);
  check("handoffs", static_cast<std::int64_t>(rep.handoffs.size()), m.handoff_count());
  check("lines", rep.lines, static_cast<std::int64_t>(m.event_count));
  const auto n = std::min(rep.handoffs.size(), m.handoffs.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = rep.handoffs[i];
    const auto& h = m.handoffs[i];
    const std::string tag = "handoff " + std::to_string(i);
    if (r.ms != h.ms || r.from != h.from || r.to != h.to || r.form != to_string(h.form))
      diffs.push_back(tag + ": identity differs");
    check((tag + " trigger").c_str(), r.trigger_us, h.trigger_time.micros());
    check((tag + " complete").c_str(), r.complete_us, h.complete_time.micros());
    check((tag + " logged latency").c_str(), r.logged_latency_us, h.latency.count());
    check((tag + " latency parts").c_str(), r.parts_us, h.latency.count());
    check((tag + " span").c_str(), r.complete_us - r.trigger_us, h.latency.count());
  }
  return diffs;
}

}  // namespace handoff
