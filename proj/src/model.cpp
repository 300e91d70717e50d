#include "secmec/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace secmec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Offload fractions summing to within this of one leave no local work.
constexpr double kFullOffloadSlack = 1e-12;

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace

void TaskSpec::validate() const {
  require(s_bits > 0, "task: s_bits must be > 0");
  require(c_cycles_per_bit > 0, "task: c_cycles_per_bit must be > 0");
  require(T_max_s > 0, "task: T_max_s must be > 0");
  require(E_budget_J > 0, "task: E_budget_J must be > 0");
  require(p_max_W > 0, "task: p_max_W must be > 0");
  require(p_circuit_W > 0, "task: p_circuit_W must be > 0");
  require(F_local_Hz > 0, "task: F_local_Hz must be > 0");
  require(eta > 0, "task: eta must be > 0");
}

void SystemConfig::validate() const {
  require(K >= 1 && M >= 1 && N >= 1, "system: K, M, N must be >= 1");
  require(B_Hz > 0, "system: B_Hz must be > 0");
  require(sigma2_W > 0, "system: sigma2_W must be > 0");
  require(c_mec_cycles_per_bit.size() == static_cast<std::size_t>(M),
          "system: c_mec_cycles_per_bit must have M entries");
  require(F_mec_Hz.size() == static_cast<std::size_t>(M), "system: F_mec_Hz must have M entries");
  require(tasks.size() == static_cast<std::size_t>(K), "system: tasks must have K entries");
  for (double f : F_mec_Hz) require(f > 0, "system: F_mec_Hz entries must be > 0");
  for (double c : c_mec_cycles_per_bit) require(c > 0, "system: c_mec entries must be > 0");
  for (const auto& t : tasks) t.validate();
}

ChannelState::ChannelState(int users, int subcarriers, int servers, double eps_bound,
                           double sigma2)
    : K(users),
      N(subcarriers),
      M(servers),
      h_tilde(static_cast<std::size_t>(users) * subcarriers * servers, 0.0),
      g_bar(static_cast<std::size_t>(users) * subcarriers, 0.0),
      eps(eps_bound),
      sigma2_W(sigma2) {}

Allocation Allocation::zeros(const SystemConfig& config) {
  Allocation a;
  a.X.assign(config.N, std::nullopt);
  a.Q = Matrix<double>(config.K, config.N);
  a.Lambda = Matrix<double>(config.K, config.M);
  a.f_local.assign(config.K, 0.0);
  a.f_mec = Matrix<double>(config.K, config.M);
  a.Phi = Matrix<double>(config.K, config.M);
  return a;
}

double Allocation::lambda_sum(int k) const {
  auto r = Lambda.row(k);
  return std::accumulate(r.begin(), r.end(), 0.0);
}

double Metrics::mean_latency_s() const {
  if (per_user_latency_s.empty()) return 0.0;
  return std::accumulate(per_user_latency_s.begin(), per_user_latency_s.end(), 0.0) /
         static_cast<double>(per_user_latency_s.size());
}

double Metrics::mean_energy_J() const {
  if (per_user_energy_J.empty()) return 0.0;
  return std::accumulate(per_user_energy_J.begin(), per_user_energy_J.end(), 0.0) /
         static_cast<double>(per_user_energy_J.size());
}

double secrecy_rate_subcarrier(double p, double h_tilde, double g_bar, double eps, double B,
                               RateClip clip) {
  if (p < 0) throw std::domain_error("secrecy_rate_subcarrier: negative power");
  if (!(B > 0)) throw std::domain_error("secrecy_rate_subcarrier: bandwidth must be > 0");
  if (p == 0) return 0.0;
  const double g = g_bar + eps;
  // log2((1 + p h) / (1 + p g)) without cancellation for nearby h, g.
  const double r = B * (std::log1p(p * h_tilde) - std::log1p(p * g)) / std::numbers::ln2;
  return clip == RateClip::Clipped ? std::max(r, 0.0) : r;
}

double local_latency(const TaskSpec& task, double lambda_sum, double f_local) {
  const double residual = 1.0 - lambda_sum;
  if (residual <= 0.0) return 0.0;
  if (!(f_local > 0))
    throw std::domain_error("local_latency: zero local frequency with nonzero workload");
  return task.c_cycles_per_bit * residual * task.s_bits / f_local;
}

double offload_latency(double s_bits, double lambda_km, double rate_bps, double c_m,
                       double f_mec) {
  if (lambda_km <= 0.0) return 0.0;
  if (!(rate_bps > 0)) throw std::domain_error("offload_latency: zero rate with offloaded bits");
  if (!(f_mec > 0)) throw std::domain_error("offload_latency: zero server frequency");
  return s_bits * lambda_km / rate_bps + c_m * s_bits * lambda_km / f_mec;
}

double local_energy(const TaskSpec& task, double lambda_sum, double f_local) {
  const double residual = std::max(1.0 - lambda_sum, 0.0);
  return task.eta * task.c_cycles_per_bit * residual * task.s_bits * f_local * f_local;
}

double offload_energy(const TaskSpec& task, std::span<const double> lambda_row,
                      std::span<const double> rate_bps, std::span<const double> tx_power_W) {
  double e = 0.0;
  for (std::size_t m = 0; m < lambda_row.size(); ++m) {
    if (lambda_row[m] <= 0.0) continue;
    if (!(rate_bps[m] > 0)) throw std::domain_error("offload_energy: zero rate with offloaded bits");
    e += task.s_bits * lambda_row[m] / rate_bps[m] * tx_power_W[m];
  }
  return e;
}

double pair_rate(const SystemConfig& config, const ChannelState& channels,
                 const Allocation& alloc, int k, int m, RateClip clip) {
  double r = 0.0;
  for (int n = 0; n < config.N; ++n) {
    if (!alloc.assigned_to(n, k, m)) continue;
    r += secrecy_rate_subcarrier(alloc.Q(k, n), channels.h(k, n, m), channels.g(k, n),
                                 channels.eps, config.B_Hz, clip);
  }
  return r;
}

double pair_tx_power(const SystemConfig& config, const Allocation& alloc, int k, int m) {
  double p = 0.0;
  for (int n = 0; n < config.N; ++n)
    if (alloc.assigned_to(n, k, m)) p += alloc.Q(k, n) + config.tasks[k].p_circuit_W;
  return p;
}

double user_radiated_power(const Allocation& alloc, int k) {
  double p = 0.0;
  for (std::size_t n = 0; n < alloc.X.size(); ++n)
    if (alloc.X[n] && alloc.X[n]->user == k) p += alloc.Q(k, n);
  return p;
}

double offload_energy(const SystemConfig& config, const ChannelState& channels,
                      const Allocation& alloc, int k) {
  std::vector<double> rates(config.M), powers(config.M);
  for (int m = 0; m < config.M; ++m) {
    rates[m] = pair_rate(config, channels, alloc, k, m, RateClip::Clipped);
    powers[m] = pair_tx_power(config, alloc, k, m);
  }
  return offload_energy(config.tasks[k], alloc.Lambda.row(k), rates, powers);
}

namespace {

// Latency and energy of user k without throwing; +inf marks an unserviceable workload.
struct UserLoad {
  double latency = 0.0;
  double energy = 0.0;
};

UserLoad user_load(const SystemConfig& config, const ChannelState& channels,
                   const Allocation& alloc, int k) {
  const TaskSpec& task = config.tasks[k];
  UserLoad u;
  const double lsum = alloc.lambda_sum(k);
  if (1.0 - lsum > kFullOffloadSlack && !(alloc.f_local[k] > 0)) {
    u.latency = kInf;
  } else if (1.0 - lsum > kFullOffloadSlack) {
    u.latency = local_latency(task, lsum, alloc.f_local[k]);
  }
  u.energy = local_energy(task, lsum, alloc.f_local[k]);
  for (int m = 0; m < config.M; ++m) {
    const double lam = alloc.Lambda(k, m);
    if (lam <= 0.0) continue;
    const double r = pair_rate(config, channels, alloc, k, m, RateClip::Clipped);
    const double f = alloc.f_mec(k, m);
    if (!(r > 0)) {
      u.latency = kInf;
      u.energy = kInf;
      continue;
    }
    u.energy += task.s_bits * lam / r * pair_tx_power(config, alloc, k, m);
    if (!(f > 0)) {
      u.latency = kInf;
      continue;
    }
    u.latency = std::max(u.latency, offload_latency(task.s_bits, lam, r, config.c_mec_cycles_per_bit[m], f));
  }
  return u;
}

}  // namespace

Metrics compute_metrics(const SystemConfig& config, const ChannelState& channels,
                        const Allocation& alloc) {
  Metrics out;
  out.per_user_rate_bps.assign(config.K, 0.0);
  out.per_user_energy_J.assign(config.K, 0.0);
  out.per_user_latency_s.assign(config.K, 0.0);
  double lcr = 0.0;
  for (int k = 0; k < config.K; ++k) {
    for (int m = 0; m < config.M; ++m)
      out.per_user_rate_bps[k] += pair_rate(config, channels, alloc, k, m, RateClip::Clipped);
    out.sum_secrecy_rate_bps += out.per_user_rate_bps[k];
    const UserLoad u = user_load(config, channels, alloc, k);
    out.per_user_latency_s[k] = u.latency;
    out.per_user_energy_J[k] = u.energy;
    lcr += std::clamp(1.0 - alloc.lambda_sum(k), 0.0, 1.0);
  }
  out.local_computing_ratio = lcr / config.K;
  return out;
}

double FeasibilityReport::max_magnitude() const {
  double m = 0.0;
  for (const auto& v : violations) m = std::max(m, v.magnitude);
  return m;
}

std::string FeasibilityReport::describe() const {
  std::ostringstream os;
  for (const auto& v : violations)
    os << v.constraint << "[" << v.index0 << "," << v.index1 << "] excess " << v.magnitude << "\n";
  return os.str();
}

FeasibilityReport check_feasibility(const SystemConfig& config, const ChannelState& channels,
                                    const Allocation& alloc, double tol_rel) {
  FeasibilityReport rep;
  auto flag = [&](const char* name, int i, int j, double magnitude) {
    rep.violations.push_back({name, i, j, magnitude});
  };
  // lhs <= rhs with relative tolerance on rhs.
  auto upper = [&](const char* name, int i, int j, double lhs, double rhs) {
    const double scale = std::max(std::abs(rhs), std::numeric_limits<double>::min());
    const double excess = (lhs - rhs) / scale;
    if (!(excess <= tol_rel)) flag(name, i, j, std::isnan(excess) ? kInf : excess);
  };
  auto nonneg = [&](const char* name, int i, int j, double v) {
    if (!(v >= -tol_rel)) flag(name, i, j, -v);
  };

  for (int k = 0; k < config.K; ++k) {
    const TaskSpec& task = config.tasks[k];
    const UserLoad u = user_load(config, channels, alloc, k);
    upper("latency", k, -1, u.latency, task.T_max_s);
    upper("energy", k, -1, u.energy, task.E_budget_J);

    double lsum = 0.0;
    for (int m = 0; m < config.M; ++m) {
      const double lam = alloc.Lambda(k, m);
      lsum += lam;
      nonneg("lambda_bounds", k, m, lam);
      if (!(lam <= 1.0 + tol_rel)) flag("lambda_bounds", k, m, lam - 1.0);
      nonneg("f_mec_nonneg", k, m, alloc.f_mec(k, m));
      if (lam > 0.0) {
        const double rate = pair_rate(config, channels, alloc, k, m, RateClip::Clipped);
        const double phi = alloc.Phi(k, m);
        if (!(phi > 0)) flag("phi_positive", k, m, -phi);
        const double scale = std::max(rate, 1.0);
        if (!((phi - rate) / scale <= tol_rel)) flag("phi_rate", k, m, (phi - rate) / scale);
      }
    }
    if (!(lsum <= 1.0 + tol_rel)) flag("lambda_sum", k, -1, lsum - 1.0);

    for (int n = 0; n < config.N; ++n) nonneg("power_nonneg", k, n, alloc.Q(k, n));
    upper("power_budget", k, -1, user_radiated_power(alloc, k), task.p_max_W);

    nonneg("f_local_bounds", k, -1, alloc.f_local[k]);
    upper("f_local_bounds", k, -1, alloc.f_local[k], task.F_local_Hz);
  }

  // A user radiating on a subcarrier it does not hold collides with the holder.
  for (int n = 0; n < config.N; ++n) {
    for (int k = 0; k < config.K; ++k) {
      const bool holder = alloc.X[n] && alloc.X[n]->user == k;
      if (!holder && alloc.Q(k, n) > 0.0) flag("exclusivity", n, k, alloc.Q(k, n));
    }
    if (alloc.X[n]) {
      const auto [k, m] = *alloc.X[n];
      if (k < 0 || k >= config.K || m < 0 || m >= config.M) flag("exclusivity", n, k, kInf);
    }
  }

  for (int m = 0; m < config.M; ++m) {
    double used = 0.0;
    for (int k = 0; k < config.K; ++k) used += alloc.f_mec(k, m);
    upper("server_capacity", m, -1, used, config.F_mec_Hz[m]);
  }
  return rep;
}

}  // namespace secmec
