#pragma once

// Reference schemes sharing the dual-decomposition driver.

#include "secmec/optimizer.hpp"

namespace secmec {

/// Equal power allocation: every user spreads one uniform power level over its
/// assigned subcarriers in place of the closed-form power step.
SolveResult solve_epa(const SystemConfig& config, const ChannelState& channels,
                      const SolverConfig& solver);

/// Full offloading: every user offloads its whole task, local CPUs stay idle.
SolveResult solve_fo(const SystemConfig& config, const ChannelState& channels,
                     const SolverConfig& solver);

}  // namespace secmec
