#pragma once

// Lagrangian dual decomposition for worst-case secrecy offloading rate
// maximization: closed-form primal blocks (subcarriers, powers, server and
// local CPU frequencies, rate lower bounds) inside a projected-subgradient
// multiplier loop, inside an outer loop that refreshes the offload fractions.

#include <iosfwd>
#include <string>
#include <vector>

#include "secmec/lp.hpp"
#include "secmec/model.hpp"

namespace secmec {

/// Multipliers, one family per relaxed constraint. Also used to carry the
/// matching constraint residuals (subgradients), which share the shape.
struct DualState {
  std::vector<double> alpha;   // [K] local latency
  Matrix<double> beta;         // [K][M] offload latency
  std::vector<double> gamma;   // [K] energy
  std::vector<double> theta;   // [K] power budget
  std::vector<double> mu;      // [M] server capacity
  Matrix<double> psi;          // [K][M] rate lower bound
  std::vector<double> varphi;  // [K] local frequency cap

  static DualState zeros(const SystemConfig& config);
  bool operator==(const DualState&) const = default;
};

enum class StepRule { Constant, Diminishing };

struct SolverConfig {
  int z_max = 100;
  int inner_max = 50;
  int dual_max = 30;
  double eps1 = 1e-6;
  double step0 = 0.1;
  StepRule step_rule = StepRule::Diminishing;
  double dual_tol = 1e-4;  // max change of the normalized multipliers
  double mu_floor = 1e-12;
  double psi_floor = 1e-12;
  double secant_tol = 1e-10;
  int secant_max_iter = 100;
  double tol_rel = 1e-6;
  P1Mode p1_mode = P1Mode::Central;
  bool epa_one_shot = false;  // EPA: stop after the first outer iteration
  bool baseline_starts = true;  // PA: also solve EPA and FO and keep the best of the three

  void validate() const;
};

enum class Scheme { PA, EPA, FO };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

/// Floor for the rate lower bound of an active pair that currently has no rate.
inline constexpr double kPhiMin = 1.0;

/// Value of the Lagrangian of the auxiliary-variable problem at (alloc, duals),
/// term by term. Pairs with zero offload fraction contribute no latency term.
double lagrangian_value(const SystemConfig& config, const ChannelState& channels,
                        const Allocation& alloc, const DualState& duals);

/// Per-subcarrier Lagrangian contribution (1 + psi) r - (gamma s lambda + theta phi) p / phi.
double subcarrier_score(const SystemConfig& config, const ChannelState& channels,
                        const DualState& duals, int k, int n, int m, double p, double lambda_km,
                        double phi_km);

/// Maximizer over p >= 0 of weight * B * log2((1 + p h)/(1 + p g)) - cost * p / phi, i.e.
/// the positive root of the stationarity quadratic, evaluated in a cancellation-free
/// form that also covers g = 0. Zero when h <= g. Throws when cost <= 0 or phi <= 0.
double secrecy_power(double h, double g, double B, double weight, double phi, double cost);

/// Closed-form transmit power for pair (k, m) on subcarrier n at the worst-case
/// eavesdropper channel.
double optimal_power(const SystemConfig& config, const ChannelState& channels,
                     const DualState& duals, int k, int n, int m, double lambda_km, double phi_km);

enum class PowerRule { Optimal, Uniform };

struct SubcarrierDecision {
  std::vector<SubcarrierAssignment> X;
  std::vector<double> power;  // power of the winning pair on each subcarrier
};

/// Assign every subcarrier to the (k, m) pair with the largest score, each pair
/// scored at its own power: the closed form under PowerRule::Optimal (p_max when
/// the cost coefficient vanishes), uniform_power[k] under PowerRule::Uniform.
/// Pairs with zero offload fraction are not candidates. Ties go to the smallest (k, m).
SubcarrierDecision allocate_subcarriers(const SystemConfig& config, const ChannelState& channels,
                                        const DualState& duals, const Matrix<double>& lambda,
                                        const Matrix<double>& phi, PowerRule rule,
                                        std::span<const double> uniform_power = {});

/// sqrt(beta s lambda c_m / max(mu, mu_floor)) before any capacity projection.
double optimal_mec_frequency(const DualState& duals, int k, int m, const TaskSpec& task,
                             double lambda_km, double c_m, double mu_floor);

/// Proportionally rescale each server column whose sum exceeds its capacity.
void project_server_capacity(Matrix<double>& f_mec, std::span<const double> F_mec_Hz);

struct LocalFrequency {
  double f_Hz = 0.0;
  double residual = 0.0;  // normalized cubic residual at the returned root
  int iterations = 0;
  int bisection_steps = 0;
};

/// Positive root of alpha c s (1 - L) - 2 gamma eta (1 - L) s c f^3 - varphi f^2 = 0 found
/// by safeguarded secant on the cubic normalized by its coefficient scale, clamped to
/// (0, F_local]. Zero when L = 1; F_local when gamma = varphi = 0 < alpha; a small
/// positive floor (1e-3 F_local) when alpha = 0. Throws std::runtime_error when the
/// iteration does not converge.
LocalFrequency optimal_user_frequency(const TaskSpec& task, double alpha, double gamma,
                                      double varphi, double lambda_sum, double tol, int max_iter);

/// sqrt((beta s lambda + s lambda gamma sum(p + p_circuit)) / max(psi, psi_floor)) clamped
/// to (0, achieved_rate]. Inactive pairs (lambda = 0) take the achieved rate.
double update_phi(const DualState& duals, int k, int m, const TaskSpec& task, double lambda_km,
                  double tx_power_sum, double achieved_rate, double psi_floor);

/// Constraint residuals at alloc, one per multiplier entry. Unserviceable workloads
/// give +inf residuals.
DualState subgradients(const SystemConfig& config, const ChannelState& channels,
                       const Allocation& alloc);

/// multiplier <- max(multiplier + step * residual, 0); mu and psi are additionally
/// held at or above their floors.
DualState update_multipliers(const DualState& duals, const DualState& residuals, double step,
                             double mu_floor = 0.0, double psi_floor = 0.0);

struct TraceRow {
  int iter = 0;
  double dual_value = 0.0;
  double best_primal_bps = 0.0;
  double max_violation = 0.0;
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;
  bool non_convergence = false;
  int outer_iterations = 0;

  void write_csv(std::ostream& os) const;
};

enum class SolveStatus { Feasible, Infeasible };

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  Allocation allocation;
  Metrics metrics;
  ConvergenceTrace trace;
  bool converged = false;
  int iterations = 0;  // middle-loop iterations in total

  bool feasible() const { return status == SolveStatus::Feasible; }
};

/// The proposed scheme (PA): dual decomposition with closed-form power allocation.
SolveResult solve(const SystemConfig& config, const ChannelState& channels,
                  const SolverConfig& solver);

/// Shared driver for the proposed scheme and the two reference schemes.
SolveResult solve_scheme(const SystemConfig& config, const ChannelState& channels,
                         const SolverConfig& solver, Scheme scheme);

}  // namespace secmec
