#pragma once

// Scenario configuration, feasibility pre-check, Monte-Carlo sweeps with CSV
// output, and the solver-versus-oracle verification.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "secmec/channel.hpp"
#include "secmec/optimizer.hpp"
#include "secmec/oracle.hpp"

namespace secmec {

/// Schema or unit error; the message starts with the offending key path.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  SystemConfig system;
  ChannelConfig channel;
  SolverConfig solver;
  std::vector<std::uint64_t> seeds;
  std::vector<Scheme> schemes;

  void validate() const;
};

enum class SweepAxis { T_max, p_max, M };

const char* axis_name(SweepAxis axis);

struct SweepSpec {
  SweepAxis axis = SweepAxis::T_max;
  std::vector<double> values;  // seconds, watts or server count
  ScenarioConfig base;

  void validate() const;
  /// The base scenario with the axis quantity set to value for every user.
  ScenarioConfig at(double value) const;
};

/// Flat keys carry their unit as a suffix (p_max_mW, F_mec_GHz, T_max_s, ...).
/// Per-user and per-server quantities accept a scalar or an array. Absent keys
/// take the full-scale defaults (configs/full_scale.json); E_budget_J defaults to 100 J.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::string& path);

/// A scenario document with an extra "sweep": {"axis": ..., "values_<unit>": [...]}.
SweepSpec parse_sweep(const nlohmann::json& doc);
SweepSpec load_sweep(const std::string& path);

struct UserBudget {
  double required_cycles = 0.0;   // c s
  double available_cycles = 0.0;  // T (F_k + sum_m F_m)
};

struct PrecheckReport {
  bool pass = false;
  double required_cycles = 0.0;   // sum_k c s
  double available_cycles = 0.0;  // T (sum_k F_k + sum_m F_m), with T the loosest deadline
  std::vector<UserBudget> users;

  std::string describe() const;
};

/// Necessary cycle-budget condition; says nothing about energy or rates.
PrecheckReport precheck(const SystemConfig& system);

struct RunOptions {
  bool deterministic_fading = false;  // unit fading, pathloss only
  bool timing = true;                 // false writes wall_ms = 0
  bool parallel = true;
  int threads = 0;  // 0 keeps the OpenMP default
};

struct RunRow {
  std::string axis;
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::PA;
  bool feasible = false;
  Metrics metrics;
  bool converged = false;
  int iters = 0;
  double wall_ms = 0.0;
  std::string status;  // "ok", "infeasible" or "error: ..."
  Allocation allocation;
  ChannelState channels;
  ConvergenceTrace trace;
};

/// One row per (seed, scheme) in that order.
std::vector<RunRow> run_scenario(const ScenarioConfig& scenario, const RunOptions& opts,
                                 const std::string& axis = "none", double axis_value = 0.0);

/// One row per (axis value, seed, scheme) in that order, whatever the thread count.
std::vector<RunRow> run_sweep(const SweepSpec& spec, const RunOptions& opts);

struct SummaryRow {
  std::string axis;
  double axis_value = 0.0;
  Scheme scheme = Scheme::PA;
  int n_seeds = 0;
  int n_feasible = 0;
  double mean_rate = 0.0;  // infeasible seeds count as zero rate
  double std_rate = 0.0;
  double mean_lcr = 0.0;  // feasible seeds only
  double std_lcr = 0.0;
  double gain_pa_pct = 0.0;  // (PA - this) / this in percent, NaN without a PA row
};

std::vector<SummaryRow> summarize(const std::vector<RunRow>& rows);

/// Shortest round-trip decimal; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double v);

void write_rows_csv(std::ostream& os, const std::vector<RunRow>& rows);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

using SolveFn = std::function<SolveResult(const SystemConfig&, const ChannelState&, const SolverConfig&)>;

struct VerifyReport {
  bool success = false;
  double solve_objective = 0.0;
  double oracle_objective = 0.0;
  bool solve_feasible = false;
  bool oracle_feasible = false;
  std::string diff;
};

/// Solver versus grid oracle on the scenario's first seed.
VerifyReport verify(const ScenarioConfig& scenario, const GridSpec& grid = {},
                    const SolveFn& solve_fn = solve, bool deterministic_fading = false);

}  // namespace secmec
