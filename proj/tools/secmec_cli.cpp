// secmec: secure offloading solver and sweep driver.
//
//   secmec run <config.json> [--out results.csv]
//   secmec sweep <sweep.json> [--out dir/]
//   secmec precheck <config.json>
//   secmec verify <config.json>
//
// Worker count for run/sweep comes from SECMEC_THREADS (default: OpenMP's).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "secmec/harness.hpp"

namespace fs = std::filesystem;
using namespace secmec;

namespace {

struct Common {
  bool allow_infeasible = false;
  bool deterministic_fading = false;
  bool no_timing = false;
  std::string seed_range;
};

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw CLI::ValidationError("--seed-range", "expected A..B");
  std::size_t used = 0;
  const auto a = std::stoull(text.substr(0, dots), &used);
  const auto b = std::stoull(text.substr(dots + 2));
  if (b < a) throw CLI::ValidationError("--seed-range", "B must be >= A");
  std::vector<std::uint64_t> out;
  for (auto s = a; s <= b; ++s) out.push_back(s);
  return out;
}

RunOptions run_options(const Common& c) {
  RunOptions o;
  o.deterministic_fading = c.deterministic_fading;
  o.timing = !c.no_timing;
  if (const char* env = std::getenv("SECMEC_THREADS")) o.threads = std::max(0, std::atoi(env));
  return o;
}

bool gate(const ScenarioConfig& sc, const Common& c, const std::string& label) {
  const PrecheckReport rep = precheck(sc.system);
  if (rep.pass) return true;
  std::cerr << label << rep.describe();
  if (c.allow_infeasible) return true;
  std::cerr << "precheck failed; pass --allow-infeasible to run anyway\n";
  return false;
}

void write_file(const fs::path& path, auto&& writer) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  writer(os);
}

int cmd_run(const std::string& path, const std::string& out, const std::string& trace_dir,
            const Common& c) {
  ScenarioConfig sc = load_config(path);
  if (!c.seed_range.empty()) sc.seeds = parse_seed_range(c.seed_range);
  if (!gate(sc, c, "")) return 2;
  const auto rows = run_scenario(sc, run_options(c));
  const auto summary = summarize(rows);
  if (out.empty()) {
    write_rows_csv(std::cout, rows);
  } else {
    write_file(out, [&](std::ostream& os) { write_rows_csv(os, rows); });
    fs::path sp(out);
    sp.replace_extension(".summary.csv");
    write_file(sp, [&](std::ostream& os) { write_summary_csv(os, summary); });
  }
  if (!trace_dir.empty())
    for (const auto& r : rows)
      write_file(fs::path(trace_dir) /
                     ("trace_seed" + std::to_string(r.seed) + "_" + scheme_name(r.scheme) + ".csv"),
                 [&](std::ostream& os) { r.trace.write_csv(os); });
  return 0;
}

int cmd_sweep(const std::string& path, const std::string& out, const Common& c) {
  SweepSpec spec = load_sweep(path);
  if (!c.seed_range.empty()) spec.base.seeds = parse_seed_range(c.seed_range);
  bool ok = true;
  for (double v : spec.values)
    ok = gate(spec.at(v), c, std::string(axis_name(spec.axis)) + "=" + format_number(v) + ": ") && ok;
  if (!ok) return 2;
  const auto rows = run_sweep(spec, run_options(c));
  const fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  const std::string stem = std::string("sweep_") + axis_name(spec.axis);
  write_file(dir / (stem + ".csv"), [&](std::ostream& os) { write_rows_csv(os, rows); });
  write_file(dir / (stem + "_summary.csv"), [&](std::ostream& os) { write_summary_csv(os, summarize(rows)); });
  std::cout << "wrote " << (dir / (stem + ".csv")).string() << " and " << (dir / (stem + "_summary.csv")).string()
            << "\n";
  return 0;
}

int cmd_precheck(const std::string& path) {
  const ScenarioConfig sc = load_config(path);
  const PrecheckReport rep = precheck(sc.system);
  std::cout << rep.describe();
  return rep.pass ? 0 : 1;
}

int cmd_verify(const std::string& path, const Common& c) {
  ScenarioConfig sc = load_config(path);
  if (!c.seed_range.empty()) sc.seeds = parse_seed_range(c.seed_range);
  const VerifyReport rep = verify(sc, GridSpec{}, solve, c.deterministic_fading);
  std::cout << "solve " << format_number(rep.solve_objective) << " bps, oracle "
            << format_number(rep.oracle_objective) << " bps: " << (rep.success ? "OK" : "FAIL") << "\n";
  if (!rep.success) std::cout << rep.diff;
  return rep.success ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worst-case secrecy offloading rate solver"};
  app.require_subcommand(1);
  Common common;
  auto flags = [&](CLI::App* sub) {
    sub->add_flag("--allow-infeasible", common.allow_infeasible, "Run even when the precheck fails");
    sub->add_flag("--deterministic-fading", common.deterministic_fading, "Pathloss only, no fading draws");
    sub->add_flag("--no-timing", common.no_timing, "Write wall_ms as 0 for byte-stable output");
    sub->add_option("--seed-range", common.seed_range, "Override seeds with A..B (inclusive)");
  };

  std::string config, out, trace_dir;
  auto* run = app.add_subcommand("run", "Solve every (seed, scheme) of a scenario");
  run->add_option("config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Results CSV (summary goes next to it)");
  run->add_option("--trace", trace_dir, "Directory for per-run convergence traces");
  flags(run);

  auto* sweep = app.add_subcommand("sweep", "Run a sweep over T_max, p_max or M");
  sweep->add_option("config", config, "Sweep JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out, "Output directory");
  flags(sweep);

  auto* pre = app.add_subcommand("precheck", "Cycle-budget feasibility check");
  pre->add_option("config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);

  auto* ver = app.add_subcommand("verify", "Compare the solver with the grid oracle");
  ver->add_option("config", config, "Scenario JSON (tiny instance)")->required()->check(CLI::ExistingFile);
  flags(ver);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config, out, trace_dir, common);
    if (*sweep) return cmd_sweep(config, out, common);
    if (*pre) return cmd_precheck(config);
    if (*ver) return cmd_verify(config, common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
