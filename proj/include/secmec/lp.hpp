#pragma once

// Small dense simplex for the offload-fraction subproblem: for fixed subcarriers,
// powers and frequencies the latency, energy and simplex constraints are linear
// in the offload fractions.

#include <span>
#include <string>
#include <vector>

#include "secmec/model.hpp"

namespace secmec {

/// A x <= b with box bounds lower <= x <= upper. Lower bounds must be finite;
/// upper bounds may be +inf.
struct LinearFeasibilityProblem {
  int n_vars = 0;
  std::vector<std::vector<double>> A_ub;
  std::vector<double> b_ub;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> row_labels;

  explicit LinearFeasibilityProblem(int n = 0);

  void add_row(std::vector<double> coeffs, double bound, std::string label = {});
  void validate() const;

  /// Largest absolute violation of any row or bound at x.
  double max_violation(std::span<const double> x) const;
};

struct LpOptions {
  double tol = 1e-9;
  int bland_after = 64;  // pivots under Dantzig's rule before switching to Bland's
  int max_pivots = 20000;
};

enum class LpStatus { Feasible, Infeasible };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double phase1_residual = 0.0;
  int pivots = 0;

  bool feasible() const { return status == LpStatus::Feasible; }
};

/// Phase-1 simplex. Returns the phase-1 vertex, or Infeasible when the minimum
/// total artificial mass exceeds tol. Throws std::runtime_error past max_pivots.
LpSolution find_feasible(const LinearFeasibilityProblem& lp, const LpOptions& opts = {});

/// Phase 1 followed by phase 2 on max objective . x. Throws on an unbounded objective.
LpSolution maximize(const LinearFeasibilityProblem& lp, std::span<const double> objective,
                    const LpOptions& opts = {});

/// Which feasible offload point to return.
///  Vertex: the phase-1 vertex as-is.
///  MaxOffload: maximize the total offloaded fraction.
///  Central: maximize the smallest normalized slack over all rows and over the
///    lower bounds of variables that can be positive (an interior point).
enum class P1Mode { Vertex, MaxOffload, Central };

struct P1Options {
  bool full_offload = false;  // adds sum_m lambda_k^m >= 1 per user
};

/// Variables are lambda_k^m at index k * M + m. Rows per user, in order:
/// local latency, offload latency for each pair that can carry traffic, energy,
/// simplex sum, then (full_offload only) sum >= 1. Pairs with zero achieved
/// rate or zero server frequency are pinned to zero through their upper bound.
LinearFeasibilityProblem build_p1(const SystemConfig& config, const ChannelState& channels,
                                  const Allocation& alloc, const P1Options& opts = {});

LpSolution solve_p1(const LinearFeasibilityProblem& lp, P1Mode mode, const LpOptions& opts = {});

}  // namespace secmec
