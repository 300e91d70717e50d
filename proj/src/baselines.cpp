#include "secmec/baselines.hpp"

namespace secmec {

SolveResult solve_epa(const SystemConfig& config, const ChannelState& channels,
                      const SolverConfig& solver) {
  return solve_scheme(config, channels, solver, Scheme::EPA);
}

SolveResult solve_fo(const SystemConfig& config, const ChannelState& channels,
                     const SolverConfig& solver) {
  return solve_scheme(config, channels, solver, Scheme::FO);
}

}  // namespace secmec
