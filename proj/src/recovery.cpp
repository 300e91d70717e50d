#include "secmec/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace secmec {

OffloadSplit min_energy_split(const TaskSpec& task, std::span<const double> rates,
                              std::span<const double> tx_power_W,
                              std::span<const double> f_mec_Hz,
                              std::span<const double> c_mec_cycles_per_bit, bool full_offload) {
  const std::size_t M = rates.size();
  const double s = task.s_bits;
  const double T = task.T_max_s;
  const double cs = task.c_cycles_per_bit * s;
  const double a = task.eta * cs * cs * cs / (T * T);

  OffloadSplit out;
  out.lambda.assign(M, 0.0);

  std::vector<double> cap(M, 0.0), cost(M, 0.0);
  for (std::size_t m = 0; m < M; ++m) {
    if (!(rates[m] > 0) || !(f_mec_Hz[m] > 0)) continue;
    cap[m] = std::min(1.0, T / (s / rates[m] + c_mec_cycles_per_bit[m] * s / f_mec_Hz[m]));
    cost[m] = s * tx_power_W[m] / rates[m];
  }
  std::vector<std::size_t> order(M);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return cost[i] < cost[j]; });

  const double total_cap = std::accumulate(cap.begin(), cap.end(), 0.0);
  const double L_lo = full_offload ? 1.0 : std::max(0.0, 1.0 - task.F_local_Hz * T / cs);
  double L_hi = std::min(1.0, total_cap);
  if (full_offload && L_hi >= 1.0 - 1e-12) L_hi = 1.0;
  if (L_lo > L_hi) return out;

  auto offload_cost = [&](double L) {
    double left = L, e = 0.0;
    for (std::size_t m : order) {
      const double take = std::min(cap[m], left);
      e += take * cost[m];
      left -= take;
      if (left <= 0.0) break;
    }
    return e;
  };
  auto energy = [&](double L) {
    const double r = 1.0 - L;
    return a * r * r * r + offload_cost(L);
  };

  // Convex in L: the minimum sits at an end point, a breakpoint of the greedy
  // fill, or a stationary point inside one of its linear pieces.
  std::vector<double> candidates{L_lo, L_hi};
  double start = 0.0;
  for (std::size_t m : order) {
    if (cap[m] <= 0.0) continue;
    const double end = start + cap[m];
    if (end > L_lo && end < L_hi) candidates.push_back(end);
    if (a > 0.0) {
      const double stationary = 1.0 - std::sqrt(cost[m] / (3.0 * a));
      if (stationary > std::max(start, L_lo) && stationary < std::min(end, L_hi))
        candidates.push_back(stationary);
    }
    start = end;
  }
  double best_L = L_lo;
  double best_E = energy(L_lo);
  for (double L : candidates) {
    const double E = energy(L);
    if (E < best_E || (E == best_E && L < best_L)) {
      best_E = E;
      best_L = L;
    }
  }

  out.offloaded = best_L;
  out.energy_J = best_E;
  out.feasible = best_E <= task.E_budget_J;
  double left = best_L;
  for (std::size_t m : order) {
    const double take = std::min(cap[m], left);
    out.lambda[m] = take;
    left -= take;
    if (left <= 0.0) break;
  }
  out.f_local_Hz = best_L >= 1.0 ? 0.0 : std::min(task.F_local_Hz, cs * (1.0 - best_L) / T);
  return out;
}

namespace {

struct Slot {
  int n;
  int m;
};

struct UserPlan {
  std::vector<double> power;  // per slot
  OffloadSplit split;
};

class UserRecovery {
 public:
  UserRecovery(const SystemConfig& config, const ChannelState& channels, int k,
               std::vector<Slot> slots, std::vector<double> f_share)
      : config_(config), channels_(channels), k_(k), slots_(std::move(slots)), f_share_(std::move(f_share)) {}

  const std::vector<Slot>& slots() const { return slots_; }

  std::optional<UserPlan> evaluate(std::vector<double> power, bool full_offload) const {
    const TaskSpec& task = config_.tasks[k_];
    const int M = config_.M;
    double total = 0.0;
    for (double p : power) total += p;
    if (!(total <= task.p_max_W)) return std::nullopt;
    std::vector<double> rates(M, 0.0), tx(M, 0.0);
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (!(power[i] > 0)) continue;
      const auto [n, m] = slots_[i];
      rates[m] += secrecy_rate_subcarrier(power[i], channels_.h(k_, n, m), channels_.g(k_, n),
                                          channels_.eps, config_.B_Hz, RateClip::Clipped);
      tx[m] += power[i] + task.p_circuit_W;
    }
    UserPlan plan;
    plan.split = min_energy_split(task, rates, tx, f_share_, config_.c_mec_cycles_per_bit, full_offload);
    if (!plan.split.feasible) return std::nullopt;
    plan.power = std::move(power);
    return plan;
  }

  // Largest feasible level along a monotone family: level(0) is the most
  // aggressive setting and level(1) the most conservative.
  template <typename PowerAt>
  std::optional<UserPlan> search(PowerAt&& power_at, bool full_offload, int scan, int bisect) const {
    if (auto plan = evaluate(power_at(0.0), full_offload)) return plan;
    double infeasible = 0.0;
    std::optional<UserPlan> found;
    double feasible = 1.0;
    for (int j = 1; j <= scan; ++j) {
      const double t = static_cast<double>(j) / scan;
      if (auto plan = evaluate(power_at(t), full_offload)) {
        found = std::move(plan);
        feasible = t;
        break;
      }
      infeasible = t;
    }
    if (!found) return std::nullopt;
    for (int i = 0; i < bisect; ++i) {
      const double mid = 0.5 * (infeasible + feasible);
      if (auto plan = evaluate(power_at(mid), full_offload)) {
        found = std::move(plan);
        feasible = mid;
      } else {
        infeasible = mid;
      }
    }
    return found;
  }

 private:
  const SystemConfig& config_;
  const ChannelState& channels_;
  int k_;
  std::vector<Slot> slots_;
  std::vector<double> f_share_;
};

}  // namespace

std::optional<Allocation> recover_feasible(const SystemConfig& config,
                                           const ChannelState& channels,
                                           const std::vector<SubcarrierAssignment>& X,
                                           const RecoveryHints& hints,
                                           const RecoveryOptions& opts) {
  const int K = config.K, M = config.M, N = config.N;

  std::vector<std::vector<Slot>> slots(K);
  Matrix<char> holds(K, M, 0);
  for (int n = 0; n < N; ++n) {
    if (!X[n]) continue;
    const auto [k, m] = *X[n];
    if (!(channels.h(k, n, m) > channels.g_worst(k, n))) continue;
    slots[k].push_back({n, m});
    holds(k, m) = 1;
  }

  Matrix<double> f_share(K, M);
  for (int m = 0; m < M; ++m) {
    double total = 0.0;
    for (int k = 0; k < K; ++k)
      if (holds(k, m)) total += std::max(hints.mec_weights(k, m), 0.0);
    int holders = 0;
    for (int k = 0; k < K; ++k) holders += holds(k, m) ? 1 : 0;
    for (int k = 0; k < K; ++k) {
      if (!holds(k, m)) continue;
      const double w = total > 0 ? std::max(hints.mec_weights(k, m), 0.0) / total : 1.0 / holders;
      f_share(k, m) = config.F_mec_Hz[m] * w;
    }
  }

  Allocation out = Allocation::zeros(config);
  out.f_mec = f_share;

  for (int k = 0; k < K; ++k) {
    const TaskSpec& task = config.tasks[k];
    std::vector<double> share(f_share.row(k).begin(), f_share.row(k).end());
    UserRecovery user(config, channels, k, slots[k], share);
    const auto& sl = user.slots();
    std::optional<UserPlan> plan;

    if (!sl.empty()) {
      if (opts.shape == PowerShape::Uniform) {
        const double floor_ratio = 1e-9;
        auto power_at = [&](double t) {
          const double total = task.p_max_W * std::pow(floor_ratio, t);
          return std::vector<double>(sl.size(), total / static_cast<double>(sl.size()));
        };
        plan = user.search(power_at, opts.full_offload, opts.scan_steps, opts.bisect_steps);
      } else {
        const DualState& d = hints.duals;
        double theta_hi = 0.0;
        for (const auto& [n, m] : sl) {
          const double h = channels.h(k, n, m), g = channels.g_worst(k, n);
          theta_hi = std::max(theta_hi, (1.0 + d.psi(k, m)) * config.B_Hz * (h - g) / std::numbers::ln2);
        }
        // Above theta_hi every subcarrier is switched off; the scan starts far below
        // it, where the budget row is what stops the power.
        const double theta_lo = theta_hi * 1e-15;
        auto power_at = [&](double t) {
          const double theta = theta_lo * std::pow(theta_hi / theta_lo, t);
          std::vector<double> p(sl.size());
          for (std::size_t i = 0; i < sl.size(); ++i) {
            const auto [n, m] = sl[i];
            const double phi = std::max(hints.phi(k, m), kPhiMin);
            const double cost = d.gamma[k] * task.s_bits * hints.lambda(k, m) + theta * phi;
            p[i] = secrecy_power(channels.h(k, n, m), channels.g_worst(k, n), config.B_Hz,
                                 1.0 + d.psi(k, m), phi, cost);
          }
          return p;
        };
        plan = user.search(power_at, opts.full_offload, opts.scan_steps, opts.bisect_steps);
      }
    }

    if (!plan) {
      UserRecovery idle(config, channels, k, {}, share);
      plan = idle.evaluate({}, opts.full_offload);
      if (!plan) return std::nullopt;
    }

    const auto& used = plan->power.empty() ? std::vector<Slot>{} : sl;
    for (std::size_t i = 0; i < used.size(); ++i) {
      if (!(plan->power[i] > 0)) continue;
      out.X[used[i].n] = UserServerPair{k, used[i].m};
      out.Q(k, used[i].n) = plan->power[i];
    }
    for (int m = 0; m < M; ++m) out.Lambda(k, m) = plan->split.lambda[m];
    out.f_local[k] = plan->split.f_local_Hz;
  }

  for (int k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m)
      out.Phi(k, m) = pair_rate(config, channels, out, k, m, RateClip::Clipped);

  if (!check_feasibility(config, channels, out, 1e-9).feasible()) return std::nullopt;
  return out;
}

}  // namespace secmec
