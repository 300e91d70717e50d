#include "secmec/optimizer.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "secmec/recovery.hpp"

namespace secmec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kResidualCap = 10.0;  // per-step cap on a normalized residual

// Multiplier times residual with 0 * inf treated as 0.
double weighted(double multiplier, double residual) {
  return multiplier == 0.0 ? 0.0 : multiplier * residual;
}

std::string fmt(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

}  // namespace

DualState DualState::zeros(const SystemConfig& config) {
  const auto K = static_cast<std::size_t>(config.K);
  const auto M = static_cast<std::size_t>(config.M);
  DualState d;
  d.alpha.assign(K, 0.0);
  d.beta = Matrix<double>(K, M);
  d.gamma.assign(K, 0.0);
  d.theta.assign(K, 0.0);
  d.mu.assign(M, 0.0);
  d.psi = Matrix<double>(K, M);
  d.varphi.assign(K, 0.0);
  return d;
}

void SolverConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("solver config: ") + what);
  };
  require(z_max >= 1, "z_max must be >= 1");
  require(inner_max >= 1, "inner_max must be >= 1");
  require(dual_max >= 1, "dual_max must be >= 1");
  require(eps1 > 0, "eps1 must be positive");
  require(step0 > 0, "step0 must be positive");
  require(dual_tol > 0, "dual_tol must be positive");
  require(mu_floor > 0 && psi_floor > 0, "floors must be positive");
  require(secant_tol > 0, "secant_tol must be positive");
  require(secant_max_iter >= 1, "secant_max_iter must be >= 1");
  require(tol_rel > 0, "tol_rel must be positive");
}

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::PA: return "PA";
    case Scheme::EPA: return "EPA";
    case Scheme::FO: return "FO";
  }
  return "?";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "PA") return Scheme::PA;
  if (name == "EPA") return Scheme::EPA;
  if (name == "FO") return Scheme::FO;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

DualState subgradients(const SystemConfig& config, const ChannelState& channels,
                       const Allocation& alloc) {
  DualState r = DualState::zeros(config);
  for (int k = 0; k < config.K; ++k) {
    const TaskSpec& task = config.tasks[k];
    const double L = alloc.lambda_sum(k);
    const double fl = alloc.f_local[k];
    double t_local = 0.0;
    if (L < 1.0) t_local = fl > 0 ? task.c_cycles_per_bit * (1.0 - L) * task.s_bits / fl : kInf;
    r.alpha[k] = t_local - task.T_max_s;

    double energy = local_energy(task, L, fl);
    for (int m = 0; m < config.M; ++m) {
      const double lam = alloc.Lambda(k, m);
      const double phi = alloc.Phi(k, m);
      const double f = alloc.f_mec(k, m);
      if (lam > 0) {
        const double tx = phi > 0 ? task.s_bits * lam / phi : kInf;
        const double cmp = f > 0 ? config.c_mec_cycles_per_bit[m] * task.s_bits * lam / f : kInf;
        r.beta(k, m) = tx + cmp - task.T_max_s;
        const double p = pair_tx_power(config, alloc, k, m);
        energy += p > 0 ? tx * p : 0.0;
      }
      r.psi(k, m) = phi - pair_rate(config, channels, alloc, k, m, RateClip::Unclipped);
    }
    r.gamma[k] = energy - task.E_budget_J;
    r.theta[k] = user_radiated_power(alloc, k) - task.p_max_W;
    r.varphi[k] = fl - task.F_local_Hz;
  }
  for (int m = 0; m < config.M; ++m) {
    double sum = 0.0;
    for (int k = 0; k < config.K; ++k) sum += alloc.f_mec(k, m);
    r.mu[m] = sum - config.F_mec_Hz[m];
  }
  return r;
}

double lagrangian_value(const SystemConfig& config, const ChannelState& channels,
                        const Allocation& alloc, const DualState& duals) {
  for (int k = 0; k < config.K; ++k)
    for (int m = 0; m < config.M; ++m)
      if (alloc.Lambda(k, m) > 0 && !(alloc.Phi(k, m) > 0))
        throw std::domain_error("lagrangian_value: zero rate bound on an active pair");

  double value = 0.0;
  for (int n = 0; n < config.N; ++n) {
    if (!alloc.X[n]) continue;
    const auto [k, m] = *alloc.X[n];
    value += secrecy_rate_subcarrier(alloc.Q(k, n), channels.h(k, n, m), channels.g(k, n),
                                     channels.eps, config.B_Hz, RateClip::Unclipped);
  }
  const DualState r = subgradients(config, channels, alloc);
  for (int k = 0; k < config.K; ++k) {
    value -= weighted(duals.alpha[k], r.alpha[k]);
    value -= weighted(duals.gamma[k], r.gamma[k]);
    value -= weighted(duals.theta[k], r.theta[k]);
    value -= weighted(duals.varphi[k], r.varphi[k]);
    for (int m = 0; m < config.M; ++m) {
      value -= weighted(duals.beta(k, m), r.beta(k, m));
      value -= weighted(duals.psi(k, m), r.psi(k, m));
    }
  }
  for (int m = 0; m < config.M; ++m) value -= weighted(duals.mu[m], r.mu[m]);
  return value;
}

double subcarrier_score(const SystemConfig& config, const ChannelState& channels,
                        const DualState& duals, int k, int n, int m, double p, double lambda_km,
                        double phi_km) {
  if (!(phi_km > 0)) throw std::invalid_argument("subcarrier_score: phi must be positive");
  const double r = secrecy_rate_subcarrier(p, channels.h(k, n, m), channels.g(k, n), channels.eps,
                                           config.B_Hz, RateClip::Unclipped);
  const double cost =
      duals.gamma[k] * config.tasks[k].s_bits * lambda_km + duals.theta[k] * phi_km;
  return (1.0 + duals.psi(k, m)) * r - cost * p / phi_km;
}

double secrecy_power(double h, double g, double B, double weight, double phi, double cost) {
  if (!(cost > 0)) throw std::domain_error("secrecy_power: cost coefficient must be positive");
  if (!(phi > 0)) throw std::domain_error("secrecy_power: phi must be positive");
  if (!(h > g)) return 0.0;
  const double A = weight * phi * B / (cost * std::numbers::ln2);
  const double d = h - g;
  // Rationalized root of h g p^2 + (h + g) p + 1 - A (h - g) = 0.
  const double p = 2.0 * (A * d - 1.0) / (std::sqrt(d * d + 4.0 * h * g * A * d) + h + g);
  return std::max(p, 0.0);
}

double optimal_power(const SystemConfig& config, const ChannelState& channels,
                     const DualState& duals, int k, int n, int m, double lambda_km, double phi_km) {
  const TaskSpec& task = config.tasks[k];
  const double h = channels.h(k, n, m);
  const double g = channels.g_worst(k, n);
  const double cost = duals.gamma[k] * task.s_bits * lambda_km + duals.theta[k] * phi_km;
  if (!(cost > 0)) return h > g ? task.p_max_W : 0.0;
  return secrecy_power(h, g, config.B_Hz, 1.0 + duals.psi(k, m), phi_km, cost);
}

SubcarrierDecision allocate_subcarriers(const SystemConfig& config, const ChannelState& channels,
                                        const DualState& duals, const Matrix<double>& lambda,
                                        const Matrix<double>& phi, PowerRule rule,
                                        std::span<const double> uniform_power) {
  SubcarrierDecision out;
  out.X.assign(config.N, std::nullopt);
  out.power.assign(config.N, 0.0);
  for (int n = 0; n < config.N; ++n) {
    double best = -kInf;
    for (int k = 0; k < config.K; ++k) {
      for (int m = 0; m < config.M; ++m) {
        const double lam = lambda(k, m);
        if (!(lam > 0)) continue;
        const double p = rule == PowerRule::Optimal
                             ? optimal_power(config, channels, duals, k, n, m, lam, phi(k, m))
                             : uniform_power[k];
        const double score = subcarrier_score(config, channels, duals, k, n, m, p, lam, phi(k, m));
        if (score > best) {
          best = score;
          out.X[n] = UserServerPair{k, m};
          out.power[n] = p;
        }
      }
    }
  }
  return out;
}

double optimal_mec_frequency(const DualState& duals, int k, int m, const TaskSpec& task,
                             double lambda_km, double c_m, double mu_floor) {
  const double num = duals.beta(k, m) * task.s_bits * lambda_km * c_m;
  return std::sqrt(std::max(num, 0.0) / std::max(duals.mu[m], mu_floor));
}

void project_server_capacity(Matrix<double>& f_mec, std::span<const double> F_mec_Hz) {
  for (std::size_t m = 0; m < f_mec.cols(); ++m) {
    double sum = 0.0;
    for (std::size_t k = 0; k < f_mec.rows(); ++k) sum += f_mec(k, m);
    if (!(sum > F_mec_Hz[m])) continue;
    const double scale = F_mec_Hz[m] / sum;
    for (std::size_t k = 0; k < f_mec.rows(); ++k) f_mec(k, m) *= scale;
  }
}

LocalFrequency optimal_user_frequency(const TaskSpec& task, double alpha, double gamma,
                                      double varphi, double lambda_sum, double tol, int max_iter) {
  LocalFrequency out;
  const double F = task.F_local_Hz;
  const double rest = 1.0 - lambda_sum;
  if (rest <= 0.0) return out;
  if (!(alpha > 0)) {
    out.f_Hz = 1e-3 * F;
    return out;
  }
  const double cs = task.c_cycles_per_bit * task.s_bits;
  const double a0 = alpha * cs * rest;
  const double a3 = 2.0 * gamma * task.eta * rest * cs * F * F * F;
  const double a2 = varphi * F * F;
  if (a3 == 0.0 && a2 == 0.0) {
    out.f_Hz = F;
    return out;
  }
  const double scale = a0 + a3 + a2;
  auto q = [&](double x) { return (a0 - a3 * x * x * x - a2 * x * x) / scale; };
  if (q(1.0) >= 0.0) {
    out.f_Hz = F;
    out.residual = std::abs(q(1.0));
    return out;
  }

  // q decreases on [0, 1] from q(0) > 0 to q(1) < 0.
  double lo = 0.0, hi = 1.0;
  double x0 = 0.0, q0 = q(0.0);
  double x1 = 1.0, q1 = q(1.0);
  for (int it = 1; it <= max_iter; ++it) {
    double x = q1 != q0 ? x1 - q1 * (x1 - x0) / (q1 - q0) : 0.5 * (lo + hi);
    if (!(x > lo && x < hi)) {
      x = 0.5 * (lo + hi);
      ++out.bisection_steps;
    }
    const double qx = q(x);
    if (qx > 0) lo = x; else hi = x;
    x0 = x1;
    q0 = q1;
    x1 = x;
    q1 = qx;
    out.iterations = it;
    if (std::abs(qx) < tol && (std::abs(x1 - x0) < 1e-13 || qx == 0.0 || hi - lo < 1e-13)) {
      out.f_Hz = std::clamp(x * F, std::numeric_limits<double>::min(), F);
      out.residual = std::abs(qx);
      return out;
    }
  }
  throw std::runtime_error("optimal_user_frequency: secant did not converge");
}

double update_phi(const DualState& duals, int k, int m, const TaskSpec& task, double lambda_km,
                  double tx_power_sum, double achieved_rate, double psi_floor) {
  if (!(lambda_km > 0)) return achieved_rate;
  const double num = duals.beta(k, m) * task.s_bits * lambda_km +
                     task.s_bits * lambda_km * duals.gamma[k] * tx_power_sum;
  if (!(achieved_rate > 0)) return kPhiMin;
  if (!(num > 0)) return achieved_rate;
  const double phi = std::sqrt(num / std::max(duals.psi(k, m), psi_floor));
  return std::min(phi, achieved_rate);
}

DualState update_multipliers(const DualState& duals, const DualState& residuals, double step,
                             double mu_floor, double psi_floor) {
  DualState d = duals;
  auto upd = [step](double& v, double r, double floor) { v = std::max({v + step * r, 0.0, floor}); };
  for (std::size_t k = 0; k < d.alpha.size(); ++k) {
    upd(d.alpha[k], residuals.alpha[k], 0.0);
    upd(d.gamma[k], residuals.gamma[k], 0.0);
    upd(d.theta[k], residuals.theta[k], 0.0);
    upd(d.varphi[k], residuals.varphi[k], 0.0);
  }
  for (std::size_t i = 0; i < d.beta.values().size(); ++i) {
    upd(d.beta.values()[i], residuals.beta.values()[i], 0.0);
    upd(d.psi.values()[i], residuals.psi.values()[i], psi_floor);
  }
  for (std::size_t m = 0; m < d.mu.size(); ++m) upd(d.mu[m], residuals.mu[m], mu_floor);
  return d;
}

void ConvergenceTrace::write_csv(std::ostream& os) const {
  os << "iter,dual_value,best_primal_bps,max_violation\n";
  for (const auto& r : rows)
    os << r.iter << ',' << fmt(r.dual_value) << ',' << fmt(r.best_primal_bps) << ','
       << fmt(r.max_violation) << '\n';
}

namespace {

// Per-family scales that make residuals dimensionless.
struct Scales {
  std::vector<double> T, E, P, Fk;
  std::vector<double> Fm;
  double R0 = 1.0;

  explicit Scales(const SystemConfig& c) : Fm(c.F_mec_Hz) {
    for (const auto& t : c.tasks) {
      T.push_back(t.T_max_s);
      E.push_back(t.E_budget_J);
      P.push_back(t.p_max_W);
      Fk.push_back(t.F_local_Hz);
    }
    R0 = c.N * c.B_Hz;
  }
};

class DualStepper {
 public:
  DualStepper(const SystemConfig& config, const SolverConfig& solver, bool full_offload)
      : config_(config), solver_(solver), scales_(config), full_offload_(full_offload) {}

  // One projected subgradient step; returns the largest change of any
  // normalized multiplier.
  double step(DualState& d, const DualState& r, double step) const {
    double change = 0.0;
    const double R0 = scales_.R0;
    auto upd = [&](double& v, double res, double scale, double floor) {
      const double ratio = std::clamp(res / scale, -kResidualCap, kResidualCap);
      const double next = std::max({v + step * R0 * ratio / scale, 0.0, floor});
      change = std::max(change, std::abs(next - v) * scale / R0);
      v = next;
    };
    for (int k = 0; k < config_.K; ++k) {
      if (!full_offload_) {
        upd(d.alpha[k], r.alpha[k], scales_.T[k], 0.0);
        upd(d.varphi[k], r.varphi[k], scales_.Fk[k], 0.0);
      }
      upd(d.gamma[k], r.gamma[k], scales_.E[k], 0.0);
      upd(d.theta[k], r.theta[k], scales_.P[k], 0.0);
      for (int m = 0; m < config_.M; ++m) {
        upd(d.beta(k, m), r.beta(k, m), scales_.T[k], 0.0);
        upd(d.psi(k, m), r.psi(k, m), R0, solver_.psi_floor);
      }
    }
    for (int m = 0; m < config_.M; ++m) upd(d.mu[m], r.mu[m], scales_.Fm[m], solver_.mu_floor);
    return change;
  }

 private:
  const SystemConfig& config_;
  const SolverConfig& solver_;
  Scales scales_;
  bool full_offload_;
};

Allocation initial_allocation(const SystemConfig& config, const ChannelState& channels,
                              bool full_offload) {
  Allocation a = Allocation::zeros(config);
  const int pairs = config.K * config.M;
  for (int n = 0; n < config.N; ++n) {
    const int idx = n % pairs;
    const int k = idx / config.M, m = idx % config.M;
    a.X[n] = UserServerPair{k, m};
    a.Q(k, n) = config.tasks[k].p_max_W / config.N;
  }
  for (int k = 0; k < config.K; ++k) {
    a.f_local[k] = full_offload ? 0.0 : config.tasks[k].F_local_Hz;
    for (int m = 0; m < config.M; ++m) {
      a.f_mec(k, m) = config.F_mec_Hz[m] / config.K;
      const double r = pair_rate(config, channels, a, k, m, RateClip::Clipped);
      a.Phi(k, m) = r > 0 ? r : kPhiMin;
    }
  }
  return a;
}

// Fallback start: subcarriers go to the pairs with the highest secrecy rate at an
// even split of each user's budget, at most ceil(N / K) per user, and each user
// spends its whole budget evenly on what it got.
Allocation greedy_allocation(const SystemConfig& config, const ChannelState& channels,
                             bool full_offload) {
  const int K = config.K, M = config.M, N = config.N;
  const int quota = (N + K - 1) / K;
  struct Cand {
    double rate;
    int n, k, m;
  };
  std::vector<Cand> cands;
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < K; ++k)
      for (int m = 0; m < M; ++m) {
        const double p = config.tasks[k].p_max_W / quota;
        const double r = secrecy_rate_subcarrier(p, channels.h(k, n, m), channels.g(k, n), channels.eps,
                                                 config.B_Hz, RateClip::Clipped);
        if (r > 0) cands.push_back({r, n, k, m});
      }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.rate > b.rate; });

  Allocation a = Allocation::zeros(config);
  std::vector<int> held(K, 0);
  for (const auto& c : cands) {
    if (a.X[c.n] || held[c.k] >= quota) continue;
    a.X[c.n] = UserServerPair{c.k, c.m};
    ++held[c.k];
  }
  for (int n = 0; n < N; ++n)
    if (a.X[n]) a.Q(a.X[n]->user, n) = config.tasks[a.X[n]->user].p_max_W / held[a.X[n]->user];
  for (int k = 0; k < K; ++k) {
    a.f_local[k] = full_offload ? 0.0 : config.tasks[k].F_local_Hz;
    for (int m = 0; m < M; ++m) {
      a.f_mec(k, m) = config.F_mec_Hz[m] / K;
      const double r = pair_rate(config, channels, a, k, m, RateClip::Clipped);
      a.Phi(k, m) = r > 0 ? r : kPhiMin;
    }
  }
  return a;
}

struct Incumbent {
  std::optional<Allocation> alloc;
  double objective = -kInf;

  bool offer(const SystemConfig& config, const ChannelState& channels, Allocation candidate) {
    const double obj = compute_metrics(config, channels, candidate).sum_secrecy_rate_bps;
    if (alloc && !(obj > objective)) return false;
    objective = obj;
    alloc = std::move(candidate);
    return true;
  }
};

SolveResult run_scheme(const SystemConfig& config, const ChannelState& channels,
                       const SolverConfig& solver, Scheme scheme) {
  const int K = config.K, M = config.M, N = config.N;
  const bool full = scheme == Scheme::FO;
  const PowerRule rule = scheme == Scheme::EPA ? PowerRule::Uniform : PowerRule::Optimal;
  RecoveryOptions rec_opts;
  rec_opts.shape = scheme == Scheme::EPA ? PowerShape::Uniform : PowerShape::DualWaterfill;
  rec_opts.full_offload = full;
  const LpOptions lp_opts;
  const DualStepper stepper(config, solver, full);

  SolveResult result;
  DualState duals = DualState::zeros(config);
  std::fill(duals.mu.begin(), duals.mu.end(), solver.mu_floor);
  std::fill(duals.psi.values().begin(), duals.psi.values().end(), solver.psi_floor);

  Allocation cur = initial_allocation(config, channels, full);
  const Allocation fallback = greedy_allocation(config, channels, full);
  Incumbent best;
  for (const Allocation* start : std::array<const Allocation*, 2>{&cur, &fallback}) {
    const RecoveryHints hints{duals, start->Lambda, start->Phi, start->f_mec};
    if (auto rec = recover_feasible(config, channels, start->X, hints, rec_opts))
      best.offer(config, channels, std::move(*rec));
  }

  Matrix<double> mec_raw(K, M);
  std::vector<double> raw_power(K, 0.0);
  double prev_round = -kInf;
  bool have_prev_round = false;
  int trace_iter = 0;

  for (int z = 1; z <= solver.z_max; ++z) {
    result.trace.outer_iterations = z;

    // Offload fractions from the LP, built on the current iterate and, failing
    // that, on the incumbent.
    LpSolution lp = solve_p1(build_p1(config, channels, cur, {full}), solver.p1_mode, lp_opts);
    const std::array<const Allocation*, 2> alternatives{best.alloc ? &*best.alloc : nullptr,
                                                        z == 1 ? &fallback : nullptr};
    for (const Allocation* alt : alternatives) {
      if (lp.feasible() || !alt) continue;
      cur = *alt;
      lp = solve_p1(build_p1(config, channels, cur, {full}), solver.p1_mode, lp_opts);
    }
    if (!lp.feasible()) break;
    for (int k = 0; k < K; ++k)
      for (int m = 0; m < M; ++m) {
        cur.Lambda(k, m) = lp.x[k * M + m];
        if (!(cur.Phi(k, m) > 0)) cur.Phi(k, m) = kPhiMin;
      }

    double round_best = -kInf;
    for (int t = 1; t <= solver.dual_max; ++t) {
      double inner_best = -kInf;
      double prev_L = 0.0;
      for (int i = 1; i <= solver.inner_max; ++i) {
        std::vector<double> uniform(K, 0.0);
        if (rule == PowerRule::Uniform) {
          std::vector<int> held(K, 0);
          for (const auto& x : cur.X)
            if (x) ++held[x->user];
          for (int k = 0; k < K; ++k) uniform[k] = config.tasks[k].p_max_W / std::max(held[k], 1);
        }
        SubcarrierDecision dec =
            allocate_subcarriers(config, channels, duals, cur.Lambda, cur.Phi, rule, uniform);

        cur.X = dec.X;
        std::fill(cur.Q.values().begin(), cur.Q.values().end(), 0.0);
        std::vector<int> held(K, 0);
        for (int n = 0; n < N; ++n)
          if (cur.X[n]) ++held[cur.X[n]->user];
        for (int n = 0; n < N; ++n) {
          if (!cur.X[n]) continue;
          const int k = cur.X[n]->user;
          cur.Q(k, n) = rule == PowerRule::Uniform ? config.tasks[k].p_max_W / held[k] : dec.power[n];
        }
        for (int k = 0; k < K; ++k) {
          raw_power[k] = user_radiated_power(cur, k);
          const double cap = config.tasks[k].p_max_W;
          if (raw_power[k] > cap)
            for (int n = 0; n < N; ++n) cur.Q(k, n) *= cap / raw_power[k];
        }

        for (int k = 0; k < K; ++k)
          for (int m = 0; m < M; ++m)
            mec_raw(k, m) = optimal_mec_frequency(duals, k, m, config.tasks[k], cur.Lambda(k, m),
                                                  config.c_mec_cycles_per_bit[m], solver.mu_floor);
        cur.f_mec = mec_raw;
        project_server_capacity(cur.f_mec, config.F_mec_Hz);

        for (int k = 0; k < K; ++k) {
          cur.f_local[k] =
              full ? 0.0
                   : optimal_user_frequency(config.tasks[k], duals.alpha[k], duals.gamma[k],
                                            duals.varphi[k], cur.lambda_sum(k), solver.secant_tol,
                                            solver.secant_max_iter)
                         .f_Hz;
          for (int m = 0; m < M; ++m) {
            const double rate = pair_rate(config, channels, cur, k, m, RateClip::Unclipped);
            cur.Phi(k, m) = update_phi(duals, k, m, config.tasks[k], cur.Lambda(k, m),
                                       pair_tx_power(config, cur, k, m), rate, solver.psi_floor);
            if (!(cur.Phi(k, m) > 0)) cur.Phi(k, m) = kPhiMin;
          }
        }

        const double L = lagrangian_value(config, channels, cur, duals);
        inner_best = std::max(inner_best, L);
        if (i > 1 && std::abs(L - prev_L) <= solver.eps1 * std::max(1.0, std::abs(prev_L))) break;
        prev_L = L;
      }

      const RecoveryHints hints{duals, cur.Lambda, cur.Phi, mec_raw};
      if (auto rec = recover_feasible(config, channels, cur.X, hints, rec_opts)) {
        round_best = std::max(round_best, compute_metrics(config, channels, *rec).sum_secrecy_rate_bps);
        best.offer(config, channels, std::move(*rec));
      }

      double dual_value = inner_best;
      if (best.alloc) dual_value = std::max(dual_value, lagrangian_value(config, channels, *best.alloc, duals));
      TraceRow row;
      row.iter = ++trace_iter;
      row.dual_value = dual_value;
      row.best_primal_bps = best.alloc ? best.objective : 0.0;
      row.max_violation = check_feasibility(config, channels, cur, solver.tol_rel).max_magnitude();
      result.trace.rows.push_back(row);

      DualState res = subgradients(config, channels, cur);
      for (int k = 0; k < K; ++k) res.theta[k] = raw_power[k] - config.tasks[k].p_max_W;
      const double step =
          solver.step_rule == StepRule::Diminishing ? solver.step0 / std::sqrt(double(t)) : solver.step0;
      ++result.iterations;
      if (stepper.step(duals, res, step) < solver.dual_tol) break;
    }

    if (scheme == Scheme::EPA && solver.epa_one_shot) {
      result.converged = true;
      break;
    }
    if (have_prev_round &&
        std::abs(round_best - prev_round) <= solver.eps1 * std::max(1.0, std::abs(prev_round))) {
      result.converged = true;
      break;
    }
    if (std::isinf(round_best) && std::isinf(prev_round) && have_prev_round) {
      result.converged = true;
      break;
    }
    prev_round = round_best;
    have_prev_round = true;
  }
  result.trace.non_convergence = !result.converged;

  if (!best.alloc) return result;
  result.status = SolveStatus::Feasible;
  result.allocation = std::move(*best.alloc);
  result.metrics = compute_metrics(config, channels, result.allocation);
  return result;
}

}  // namespace

SolveResult solve(const SystemConfig& config, const ChannelState& channels,
                  const SolverConfig& solver) {
  return solve_scheme(config, channels, solver, Scheme::PA);
}

SolveResult solve_scheme(const SystemConfig& config, const ChannelState& channels,
                         const SolverConfig& solver, Scheme scheme) {
  config.validate();
  solver.validate();
  SolveResult result = run_scheme(config, channels, solver, scheme);
  if (scheme != Scheme::PA || !solver.baseline_starts) return result;

  // Both baseline feasible sets sit inside PA's, so their answers are PA candidates.
  for (Scheme s : {Scheme::EPA, Scheme::FO}) {
    SolveResult b = run_scheme(config, channels, solver, s);
    if (!b.feasible() || !check_feasibility(config, channels, b.allocation, solver.tol_rel).feasible()) continue;
    if (result.feasible() && !(b.metrics.sum_secrecy_rate_bps > result.metrics.sum_secrecy_rate_bps)) continue;
    result.status = SolveStatus::Feasible;
    result.allocation = std::move(b.allocation);
    result.metrics = std::move(b.metrics);
  }
  return result;
}

}  // namespace secmec
