// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "handoff/check.hpp"
#include "handoff/engine.hpp"
#include "handoff/replay.hpp"
#include "oracles.hpp"
#include "property_suites.hpp"
#include "scenarios.hpp"

using namespace handoff;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string ms_of(double us) { return fmt(us / 1000.0) + " ms"; }

std::vector<std::uint64_t> seeds_1_to(std::uint64_t n) {
  std::vector<std::uint64_t> v(n);
  std::iota(v.begin(), v.end(), 1);
  return v;
}

const std::vector<double> kLoads{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

Verdict formula_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = formula_self_check();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  int failed = 0;
  std::string first;
  for (const auto& r : results)
    if (!r.pass && failed++ == 0) first = r.name + " = " + r.detail;
  Verdict v;
  v.pass = failed == 0 && secs < 1.0;
  v.detail = std::to_string(results.size()) + " identities, " + std::to_string(failed) + " mismatches, " +
             fmt(secs * 1000.0, 3) + " ms" + (first.empty() ? "" : "; first: " + first);
  return v;
}

Verdict selection_oracle() {
  Rng rng(2718);
  int ws_agree = 0, lex_agree = 0, n = 0;
  for (; n < 2000; ++n) {
    std::vector<oracle::Cand> inst;
    const auto k = 1 + rng.below(6);
    for (std::uint64_t i = 0; i < k; ++i)
      inst.push_back({static_cast<std::int32_t>(i * 5 + rng.below(5)), static_cast<std::int64_t>(rng.below(34)),
                      static_cast<std::int64_t>(rng.below(6)), static_cast<std::int64_t>(rng.below(7)),
                      -52.0 + 0.5 * static_cast<double>(rng.below(30))});
    std::vector<CandidateFeatures> f;
    for (const auto& c : inst) f.push_back({c.ap, c.ms, c.cnx, c.ext, Dbm(c.rssi)});
    SelectionPolicy ws;
    SelectionPolicy lex;
    lex.mode = SelectionMode::Lexicographic;
    ws_agree += select_next_ap(f, std::nullopt, ws) == oracle::weighted_argmax(inst, -51.0, 32, 1, 1, 1, 1);
    lex_agree += select_next_ap(f, std::nullopt, lex) == oracle::lexicographic_first(inst, -51.0, 32);
  }
  return {ws_agree == n && lex_agree == n, std::to_string(n) + " instances; weighted_sum " + std::to_string(ws_agree) +
                                              "/" + std::to_string(n) + ", lexicographic " + std::to_string(lex_agree) +
                                              "/" + std::to_string(n)};
}

Verdict two_ap_walkthrough() {
  std::stringstream pshp_trace, std_trace;
  const auto p = run(fixtures::two_ap_walk(SchemeKind::Pshp), &pshp_trace);
  const auto s = run(fixtures::two_ap_walk(SchemeKind::StandardActive), &std_trace);
  const auto p_diffs = reconcile(replay_trace(pshp_trace), p);
  const auto s_diffs = reconcile(replay_trace(std_trace), s);

  const Duration reassoc = Duration::millis(1) * kAssocFrameCount;  // flat contention at zero load
  const Duration auth_assoc = Duration::millis(1) * (auth_frame_count(AuthMode::OpenSystem) + kAssocFrameCount);
  const bool pshp_ok = p.handoff_count() == 1 && p.handoffs[0].form == HandoffForm::Form1 &&
                       p.handoffs[0].latency == reassoc;
  const bool std_ok = s.handoff_count() == 1 && s.handoffs[0].latency >= Duration::millis(77) + auth_assoc;
  Verdict v;
  v.pass = pshp_ok && std_ok && p_diffs.empty() && s_diffs.empty();
  v.detail = "pshp " + std::to_string(p.handoff_count()) + " handoff(s)";
  if (p.handoff_count() > 0)
    v.detail += " " + std::string(to_string(p.handoffs[0].form)) + " " + std::to_string(p.handoffs[0].latency.count()) + " us";
  v.detail += "; standard " + std::to_string(s.handoff_count()) + " handoff(s)";
  if (s.handoff_count() > 0) v.detail += " " + std::to_string(s.handoffs[0].latency.count()) + " us";
  v.detail += "; replay diffs " + std::to_string(p_diffs.size() + s_diffs.size());
  return v;
}

struct SchemeSweep {
  std::vector<SweepRow> rows;
  double pooled_mean_us = 0.0;
  double mean_form1 = 0.0;
  double pooled_loss = 0.0;
};

SchemeSweep run_sweep(const Scenario& s, const std::vector<double>& loads, std::uint64_t seeds) {
  SchemeSweep out;
  const auto runs = sweep(s, loads, seeds_1_to(seeds));
  out.rows = aggregate(runs);
  double sum = 0.0, lost = 0.0, emitted = 0.0;
  std::int64_t n = 0;
  for (const auto& r : runs) {
    for (const auto& h : r.ledger.handoffs) sum += static_cast<double>(h.latency.count());
    n += r.ledger.handoff_count();
    lost += static_cast<double>(r.ledger.deadline_dropped + r.ledger.handoff_lost);
    emitted += static_cast<double>(r.ledger.emitted);
  }
  out.pooled_mean_us = n > 0 ? sum / static_cast<double>(n) : 0.0;
  out.pooled_loss = emitted > 0 ? lost / emitted : 0.0;
  for (const auto& row : out.rows) out.mean_form1 += row.form1_fraction / static_cast<double>(out.rows.size());
  return out;
}

SchemeSweep g_pshp;  // shared by the latency and form-mix criteria

Verdict latency_ordering() {
  g_pshp = run_sweep(fixtures::hex_sweep(SchemeKind::Pshp), kLoads, 10);
  const auto apfh = run_sweep(fixtures::hex_sweep(SchemeKind::Apfh), kLoads, 10);
  const auto std_active = run_sweep(fixtures::hex_sweep(SchemeKind::StandardActive), kLoads, 10);
  bool ordered = true, under_50 = true;
  std::string per_load;
  for (std::size_t i = 0; i < kLoads.size(); ++i) {
    const double a = g_pshp.rows[i].mean_latency_us, b = apfh.rows[i].mean_latency_us,
                 c = std_active.rows[i].mean_latency_us;
    ordered = ordered && a < b && b < c;
    under_50 = under_50 && a < 50'000.0;
    per_load += " " + fmt(kLoads[i], 1) + ":" + fmt(a / 1000.0, 1) + "/" + fmt(b / 1000.0, 1) + "/" + fmt(c / 1000.0, 0);
  }
  const bool in_band = g_pshp.pooled_mean_us >= 4'000.0 && g_pshp.pooled_mean_us <= 30'000.0;
  return {ordered && under_50 && in_band,
          "pshp mean " + ms_of(g_pshp.pooled_mean_us) + " (band 4-30 ms), ordered at every load " +
              (ordered ? "yes" : "no") + ", pshp < 50 ms at every load " + (under_50 ? "yes" : "no") +
              "; load:pshp/apfh/standard ms" + per_load};
}

Verdict form_mix() {
  auto ws = fixtures::hex_sweep(SchemeKind::Pshp);
  ws.selection.policy = SelectionPolicy{};
  const auto with_heuristic = run_sweep(ws, kLoads, 10);
  const bool ok = g_pshp.mean_form1 >= 0.45 && with_heuristic.mean_form1 >= 0.60;
  return {ok, "form1 fraction pshp " + fmt(g_pshp.mean_form1, 3) + " (>= 0.45), pshp+weighted_sum " +
                  fmt(with_heuristic.mean_form1, 3) + " (>= 0.60)"};
}

Verdict loss_ordering() {
  auto base = fixtures::constrained_area(SchemeKind::Pshp);
  auto with_ws = [](Scenario s) {
    s.selection.policy = SelectionPolicy{};
    return s;
  };
  auto std_s = base;
  std_s.scheme = SchemeKind::StandardActive;
  const double pshp_h = run_sweep(with_ws(base), {0.5}, 10).pooled_loss;
  const double pshp = run_sweep(base, {0.5}, 10).pooled_loss;
  const double std_h = run_sweep(with_ws(std_s), {0.5}, 10).pooled_loss;
  const double std_plain = run_sweep(std_s, {0.5}, 10).pooled_loss;
  const bool ok = pshp_h < pshp && pshp < std_h && std_h < std_plain;
  auto e = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return std::string(buf);
  };
  return {ok, "loss pshp+heuristic " + e(pshp_h) + ", pshp " + e(pshp) + ", standard+heuristic " + e(std_h) +
                  ", standard " + e(std_plain)};
}

Verdict property_suites() {
  bool ok = true;
  std::string detail;
  for (const auto& suite : props::all_suites()) {
    const auto r = suite();
    ok = ok && r.pass();
    if (!detail.empty()) detail += "; ";
    detail += r.name + " " + std::to_string(r.cases) + " cases " + (r.pass() ? "ok" : "FAILED " + r.first_failure);
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 formula exactness", formula_exactness},
      {"2 selection oracle agreement", selection_oracle},
      {"3 two-AP walkthrough", two_ap_walkthrough},
      {"4 latency ordering", latency_ordering},
      {"5 form mix", form_mix},
      {"6 loss ordering", loss_ordering},
      {"7 property suites", property_suites},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failed;
    std::printf("%s criterion %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
