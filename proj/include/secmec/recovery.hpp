#pragma once

// Primal recovery: turns the subcarrier assignment and power profile produced by a
// dual step into an allocation that satisfies every constraint of the original
// problem, or reports that none was found.

#include <optional>
#include <span>
#include <vector>

#include "secmec/model.hpp"
#include "secmec/optimizer.hpp"

namespace secmec {

/// Cheapest way for one user to split its task between local computing and the
/// servers it holds subcarriers on, given fixed rates and powers. The local CPU runs
/// at the slowest frequency meeting the deadline, so local energy is
/// eta (c s)^3 (1 - L)^3 / T^2 for offloaded share L; offloaded bits are placed on
/// the servers with the lowest energy per unit fraction first, each capped by its
/// latency limit.
struct OffloadSplit {
  bool feasible = false;
  double offloaded = 0.0;  // L = sum_m lambda_m
  double energy_J = 0.0;
  std::vector<double> lambda;
  double f_local_Hz = 0.0;
};

/// rates[m] and tx_power_W[m] (radiated plus circuit) describe the user's
/// subcarriers on server m; f_mec_Hz[m] is the server capacity reserved for it.
OffloadSplit min_energy_split(const TaskSpec& task, std::span<const double> rates,
                              std::span<const double> tx_power_W,
                              std::span<const double> f_mec_Hz,
                              std::span<const double> c_mec_cycles_per_bit, bool full_offload);

enum class PowerShape { DualWaterfill, Uniform };

struct RecoveryHints {
  const DualState& duals;
  const Matrix<double>& lambda;       // offload fractions of the dual step
  const Matrix<double>& phi;          // rate lower bounds of the dual step
  const Matrix<double>& mec_weights;  // unprojected server frequencies of the dual step
};

struct RecoveryOptions {
  PowerShape shape = PowerShape::DualWaterfill;
  bool full_offload = false;
  int scan_steps = 48;
  int bisect_steps = 40;
};

/// Subcarriers whose legitimate channel does not beat the worst-case eavesdropper are
/// released. Each server's capacity is shared among the users holding its
/// subcarriers in proportion to mec_weights (equal shares when those are all zero).
/// Per user, the largest power level for which a feasible split exists is found by a
/// geometric scan followed by bisection: under DualWaterfill the level is the power
/// multiplier theta in the closed-form power, under Uniform it is the total power
/// spread evenly. A user with no feasible level keeps
/// no subcarriers and computes locally.
std::optional<Allocation> recover_feasible(const SystemConfig& config,
                                           const ChannelState& channels,
                                           const std::vector<SubcarrierAssignment>& X,
                                           const RecoveryHints& hints,
                                           const RecoveryOptions& opts);

}  // namespace secmec
