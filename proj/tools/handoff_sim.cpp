// Command-line driver: load a scenario, sweep loads x seeds, write CSV.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "handoff/check.hpp"
#include "handoff/config.hpp"
#include "handoff/context_export.hpp"
#include "handoff/csv.hpp"
#include "handoff/engine.hpp"

namespace {

constexpr int kExitCheck = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Options {
  std::string config;
  std::string scheme;
  std::string selection;
  std::int64_t seed = -1;
  std::string seeds;
  std::string loads;
  std::string duration;
  std::string out;
  std::string trace;
  std::string context_out;
  unsigned threads = 0;
  bool check = false;
  bool summary = false;
};

handoff::RunPlan build_plan(const Options& o) {
  using namespace handoff;
  RunPlan plan = o.config.empty() ? parse_config_text("[aps]\n") : load_config(o.config);
  Scenario& s = plan.scenario;
  if (!o.scheme.empty()) {
    auto k = parse_scheme(o.scheme);
    if (!k) throw ConfigError(0, "--scheme must be standard_active, standard_passive, apfh or pshp");
    s.scheme = *k;
  }
  if (!o.selection.empty()) {
    if (o.selection == "none") {
      s.selection.policy.reset();
    } else {
      auto m = parse_selection_mode(o.selection);
      if (!m) throw ConfigError(0, "--selection must be none, weighted_sum, lexicographic or rssi_only");
      if (!s.selection.policy) s.selection.policy.emplace();
      s.selection.policy->mode = *m;
    }
  }
  if (o.seed >= 0) {
    s.seed = static_cast<std::uint64_t>(o.seed);
    plan.seeds.clear();
  }
  if (!o.seeds.empty()) plan.seeds = parse_seed_list(o.seeds);
  if (!o.loads.empty()) plan.loads = parse_load_list(o.loads);
  if (!o.duration.empty()) {
    const bool bare = o.duration.find_first_not_of("0123456789.") == std::string::npos;
    s.duration = detail::parse_duration(bare ? o.duration + "s" : o.duration, 0);
  }
  try {
    s.validate();
  } catch (const std::exception& e) {
    throw ConfigError(0, e.what());
  }
  if (plan.loads.empty()) plan.loads = {s.load};
  if (plan.seeds.empty()) plan.seeds = {s.seed};
  return plan;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator of 802.11 inter-cell handoff schemes"};
  Options o;
  app.add_option("--config", o.config, "Scenario file (INI)");
  app.add_option("--scheme", o.scheme, "standard_active | standard_passive | apfh | pshp");
  app.add_option("--selection", o.selection, "none | weighted_sum | lexicographic | rssi_only");
  app.add_option("--seed", o.seed, "Single run seed");
  app.add_option("--seeds", o.seeds, "Seed range N..M or list a,b,c");
  app.add_option("--loads", o.loads, "Load list a,b,c or range lo..hi:step");
  app.add_option("--duration", o.duration, "Simulated time in seconds (or with a unit: 500ms)");
  app.add_option("--out", o.out, "CSV output path (default: stdout)");
  app.add_option("--trace", o.trace, "Event log output path (single run only)");
  app.add_option("--context-out", o.context_out, "Write the final neighbour context as JSON (single run only)");
  app.add_option("--threads", o.threads, "Parallel runs (0: all cores)");
  app.add_flag("--check", o.check, "Run the closed-form self-checks and exit");
  app.add_flag("--summary", o.summary, "Print per-load aggregates to stderr");
  CLI11_PARSE(app, argc, argv);

  if (o.check) return handoff::print_check(std::cout, handoff::formula_self_check()) ? 0 : kExitCheck;

  handoff::RunPlan plan;
  try {
    plan = build_plan(o);
    if ((!o.trace.empty() || !o.context_out.empty()) && plan.loads.size() * plan.seeds.size() != 1)
      throw handoff::ConfigError(0, "--trace and --context-out need exactly one (load, seed) run");
  } catch (const handoff::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  }

  try {
    std::vector<handoff::SweepRun> runs;
    if (!o.trace.empty() || !o.context_out.empty()) {
      std::ofstream trace;
      if (!o.trace.empty()) {
        trace.open(o.trace);
        if (!trace) throw std::ios_base::failure("cannot open trace file " + o.trace);
      }
      handoff::Scenario s = plan.scenario;
      s.load = plan.loads.front();
      s.seed = plan.seeds.front();
      handoff::Simulator sim(s, o.trace.empty() ? nullptr : &trace);
      runs.push_back({s.load, s.seed, sim.run()});
      if (!o.context_out.empty()) {
        std::ofstream ctx(o.context_out);
        if (!ctx) throw std::ios_base::failure("cannot open context file " + o.context_out);
        handoff::write_context_json(ctx, sim.context());
      }
    } else {
      runs = handoff::sweep(plan.scenario, plan.loads, plan.seeds, o.threads);
    }

    if (o.out.empty()) {
      handoff::write_csv(std::cout, runs, plan.scenario.scheme, plan.scenario.selection);
    } else {
      std::ofstream out(o.out);
      if (!out) throw std::ios_base::failure("cannot open output file " + o.out);
      handoff::write_csv(out, runs, plan.scenario.scheme, plan.scenario.selection);
    }
    if (o.summary) {
      for (const auto& row : handoff::aggregate(runs))
        std::cerr << "load " << row.load << ": handoffs " << row.handoffs << ", mean latency "
                  << row.mean_latency_us / 1000.0 << " ms, form1 " << row.form1_fraction << ", loss "
                  << row.loss_probability << '\n';
    }
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
