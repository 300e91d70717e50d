#pragma once

// Domain types of the secure multi-server offloading problem and the
// closed-form rate / latency / energy expressions built on them.
//
// All quantities are SI: watts, hertz, joules, seconds, bits, cycles.
// Channel-power-to-noise ratios are in 1/W.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace secmec {

/// Dense row-major matrix with value semantics.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T init = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, init) {}

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

struct TaskSpec {
  double s_bits = 0.0;
  double c_cycles_per_bit = 0.0;
  double T_max_s = 0.0;
  double E_budget_J = 0.0;
  double p_max_W = 0.0;
  double p_circuit_W = 0.0;
  double F_local_Hz = 0.0;
  double eta = 0.0;  // J*s^2/cycle^3

  void validate() const;
};

struct SystemConfig {
  int K = 0;
  int M = 0;
  int N = 0;
  double B_Hz = 0.0;
  double sigma2_W = 0.0;
  std::vector<double> c_mec_cycles_per_bit;  // size M
  std::vector<double> F_mec_Hz;              // size M
  std::vector<TaskSpec> tasks;               // size K

  void validate() const;
};

/// Worst-case-ready channel state. Ratios are gains divided by the noise power.
struct ChannelState {
  int K = 0;
  int N = 0;
  int M = 0;
  std::vector<double> h_tilde;  // [K][N][M]
  std::vector<double> g_bar;    // [K][N]
  double eps = 0.0;
  double sigma2_W = 0.0;

  ChannelState() = default;
  ChannelState(int users, int subcarriers, int servers, double eps_bound, double sigma2);

  double& h(int k, int n, int m) { return h_tilde[(static_cast<std::size_t>(k) * N + n) * M + m]; }
  double h(int k, int n, int m) const {
    return h_tilde[(static_cast<std::size_t>(k) * N + n) * M + m];
  }
  double& g(int k, int n) { return g_bar[static_cast<std::size_t>(k) * N + n]; }
  double g(int k, int n) const { return g_bar[static_cast<std::size_t>(k) * N + n]; }
  /// Eavesdropper ratio at the edge of the uncertainty set.
  double g_worst(int k, int n) const { return g(k, n) + eps; }

  bool operator==(const ChannelState&) const = default;
};

struct UserServerPair {
  int user = 0;
  int server = 0;
  bool operator==(const UserServerPair&) const = default;
};

using SubcarrierAssignment = std::optional<UserServerPair>;

struct Allocation {
  std::vector<SubcarrierAssignment> X;  // [N]
  Matrix<double> Q;                     // [K][N] transmit powers
  Matrix<double> Lambda;                // [K][M] offload fractions
  std::vector<double> f_local;          // [K]
  Matrix<double> f_mec;                 // [K][M]
  Matrix<double> Phi;                   // [K][M] rate lower bounds

  /// All-zero allocation with every subcarrier unassigned.
  static Allocation zeros(const SystemConfig& config);

  bool assigned_to(int n, int k, int m) const {
    return X[n] && X[n]->user == k && X[n]->server == m;
  }
  double lambda_sum(int k) const;
};

struct Metrics {
  double sum_secrecy_rate_bps = 0.0;
  std::vector<double> per_user_rate_bps;
  double local_computing_ratio = 0.0;
  std::vector<double> per_user_energy_J;
  std::vector<double> per_user_latency_s;

  double mean_latency_s() const;
  double mean_energy_J() const;
};

enum class RateClip { Clipped, Unclipped };

/// B [log2(1 + p h) - log2(1 + p (g_bar + eps))], optionally floored at zero.
double secrecy_rate_subcarrier(double p, double h_tilde, double g_bar, double eps, double B,
                               RateClip clip);

double local_latency(const TaskSpec& task, double lambda_sum, double f_local);
double offload_latency(double s_bits, double lambda_km, double rate_bps, double c_m,
                       double f_mec);
double local_energy(const TaskSpec& task, double lambda_sum, double f_local);

/// Transmission energy from per-server offload fractions, achieved rates and the
/// summed radiated-plus-circuit power on that server's subcarriers.
double offload_energy(const TaskSpec& task, std::span<const double> lambda_row,
                      std::span<const double> rate_bps, std::span<const double> tx_power_W);

/// Rate delivered from user k to server m over the subcarriers assigned to that pair.
double pair_rate(const SystemConfig& config, const ChannelState& channels,
                 const Allocation& alloc, int k, int m, RateClip clip);

/// Sum over assigned subcarriers of (p + p_circuit) for pair (k, m).
double pair_tx_power(const SystemConfig& config, const Allocation& alloc, int k, int m);

/// Sum of radiated power over the subcarriers assigned to user k.
double user_radiated_power(const Allocation& alloc, int k);

double offload_energy(const SystemConfig& config, const ChannelState& channels,
                      const Allocation& alloc, int k);

/// Clipped-rate metrics. Latency of a user whose constraints cannot be evaluated
/// (positive workload on a zero rate or zero frequency) is +inf.
Metrics compute_metrics(const SystemConfig& config, const ChannelState& channels,
                        const Allocation& alloc);

struct Violation {
  std::string constraint;
  int index0 = -1;  // user, subcarrier or server depending on the constraint
  int index1 = -1;
  double magnitude = 0.0;  // relative excess where a scale exists, absolute otherwise
};

struct FeasibilityReport {
  std::vector<Violation> violations;
  bool feasible() const { return violations.empty(); }
  double max_magnitude() const;
  std::string describe() const;
};

FeasibilityReport check_feasibility(const SystemConfig& config, const ChannelState& channels,
                                    const Allocation& alloc, double tol_rel);

}  // namespace secmec
