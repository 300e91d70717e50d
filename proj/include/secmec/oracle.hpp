#pragma once

// Exhaustive grid search over assignments, powers, offload fractions and
// frequencies on tiny instances. Used as an independent optimum estimate.

#include <cstdint>

#include "secmec/model.hpp"

namespace secmec {

/// Powers and offload fractions use `levels` evenly spaced points including both
/// end points; frequencies use F * j / f_levels for j = 1..f_levels.
struct GridSpec {
  int p_levels = 64;
  int lambda_levels = 51;
  int f_levels = 32;

  void validate() const;
};

struct OracleResult {
  bool feasible = false;
  double objective = 0.0;  // clipped sum secrecy rate of the best grid point
  Allocation allocation;
  std::int64_t evaluated = 0;  // (assignment, power) candidates examined
};

/// Requires K * M <= 2 and N <= 3, throws std::length_error otherwise.
/// Frequencies are not enumerated point by point: for fixed powers and fractions
/// the smallest grid frequency meeting the latency row is optimal for every other
/// row, so only that one is tried. Ties go to the first grid point in
/// enumeration order. Parallel over assignments with a deterministic reduction.
OracleResult brute_force(const SystemConfig& config, const ChannelState& channels,
                         const GridSpec& grid = {});

/// Single-threaded reference of brute_force.
OracleResult brute_force_serial(const SystemConfig& config, const ChannelState& channels,
                                const GridSpec& grid = {});

}  // namespace secmec
