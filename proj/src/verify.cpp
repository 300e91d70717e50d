#include <sstream>

#include "secmec/harness.hpp"

namespace secmec {

VerifyReport verify(const ScenarioConfig& scenario, const GridSpec& grid, const SolveFn& solve_fn,
                    bool deterministic_fading) {
  scenario.validate();
  ChannelConfig cc = scenario.channel;
  if (deterministic_fading) cc.fading = FadingMode::Unit;
  const ChannelState ch = generate(cc, scenario.system, scenario.seeds.front());

  VerifyReport rep;
  const OracleResult oracle = brute_force(scenario.system, ch, grid);
  const SolveResult sol = solve_fn(scenario.system, ch, scenario.solver);
  rep.oracle_feasible = oracle.feasible;
  rep.oracle_objective = oracle.feasible ? oracle.objective : 0.0;

  std::ostringstream diff;
  if (sol.feasible()) {
    const FeasibilityReport feas = check_feasibility(scenario.system, ch, sol.allocation, 1e-6);
    rep.solve_feasible = feas.feasible();
    rep.solve_objective = compute_metrics(scenario.system, ch, sol.allocation).sum_secrecy_rate_bps;
    if (!rep.solve_feasible) diff << "solver allocation violates:\n" << feas.describe();
  } else {
    diff << "solver reported no feasible allocation\n";
  }
  if (!oracle.feasible) diff << "oracle found no feasible grid point\n";

  const double target = 0.95 * rep.oracle_objective;
  const bool close = rep.solve_objective >= target;
  if (!close)
    diff << "objective " << rep.solve_objective << " bps < 0.95 x oracle " << rep.oracle_objective
         << " bps\n";
  // With no feasible grid point there is nothing to match; a feasible solve still counts.
  rep.success = oracle.feasible ? rep.solve_feasible && close : !sol.feasible() || rep.solve_feasible;
  rep.diff = diff.str();
  return rep;
}

}  // namespace secmec
