#include "secmec/oracle.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include <omp.h>

namespace secmec {

void GridSpec::validate() const {
  if (p_levels < 2 || lambda_levels < 2 || f_levels < 2)
    throw std::invalid_argument("grid: every level count must be >= 2");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

struct Best {
  bool found = false;
  double objective = -kInf;
  std::int64_t evaluated = 0;
  Allocation alloc;
};

class Search {
 public:
  Search(const SystemConfig& config, const ChannelState& channels, const GridSpec& grid)
      : c_(config), ch_(channels), g_(grid), pairs_(config.K * config.M),
        assignments_(ipow(pairs_ + 1, config.N)) {}

  std::int64_t assignments() const { return assignments_; }

  void scan(std::int64_t xi, Best& best) const {
    const int K = c_.K, N = c_.N;
    std::vector<int> code(N);  // 0 = unassigned, otherwise 1 + k * M + m
    std::vector<int> held;
    for (int n = 0; n < N; ++n) {
      code[n] = static_cast<int>(xi % (pairs_ + 1));
      xi /= pairs_ + 1;
      if (code[n] > 0) held.push_back(n);
    }
    const std::int64_t combos = ipow(g_.p_levels, static_cast<int>(held.size()));
    std::vector<double> power(N, 0.0);
    std::vector<double> used(K);
    for (std::int64_t pi = 0; pi < combos; ++pi) {
      std::int64_t rest = pi;
      std::fill(used.begin(), used.end(), 0.0);
      std::fill(power.begin(), power.end(), 0.0);
      for (int n : held) {
        const int k = (code[n] - 1) / c_.M;
        const int j = static_cast<int>(rest % g_.p_levels);
        rest /= g_.p_levels;
        power[n] = c_.tasks[k].p_max_W * j / (g_.p_levels - 1);
        used[k] += power[n];
      }
      bool within = true;
      for (int k = 0; k < K; ++k) within = within && used[k] <= c_.tasks[k].p_max_W;
      if (!within) continue;

      double objective = 0.0;
      for (int n : held) {
        const int k = (code[n] - 1) / c_.M, m = (code[n] - 1) % c_.M;
        objective += secrecy_rate_subcarrier(power[n], ch_.h(k, n, m), ch_.g(k, n), ch_.eps,
                                             c_.B_Hz, RateClip::Clipped);
      }
      ++best.evaluated;
      if (best.found && !(objective > best.objective)) continue;
      if (auto alloc = fit(code, power)) {
        best.found = true;
        best.objective = objective;
        best.alloc = std::move(*alloc);
      }
    }
  }

 private:
  // Smallest grid frequency F j / f_levels that is >= need, or nullopt.
  std::optional<double> grid_frequency(double need, double F) const {
    const int L = g_.f_levels;
    int j = std::max(1, static_cast<int>(std::ceil(need / F * L)));
    while (j <= L && F * j / L < need) ++j;
    if (j > L) return std::nullopt;
    return F * j / L;
  }

  std::optional<Allocation> fit(const std::vector<int>& code, const std::vector<double>& power) const {
    const int K = c_.K, M = c_.M, N = c_.N;
    Allocation a = Allocation::zeros(c_);
    for (int n = 0; n < N; ++n) {
      if (code[n] == 0) continue;
      const int k = (code[n] - 1) / M, m = (code[n] - 1) % M;
      a.X[n] = UserServerPair{k, m};
      a.Q(k, n) = power[n];
    }
    std::vector<double> rate(pairs_), tx(pairs_);
    for (int k = 0; k < K; ++k)
      for (int m = 0; m < M; ++m) {
        rate[k * M + m] = pair_rate(c_, ch_, a, k, m, RateClip::Clipped);
        tx[k * M + m] = pair_tx_power(c_, a, k, m);
      }

    const int Ll = g_.lambda_levels;
    const std::int64_t combos = ipow(Ll, pairs_);
    std::vector<double> lam(pairs_);
    std::vector<double> fm(pairs_);
    std::vector<double> fl(K);
    for (std::int64_t li = 0; li < combos; ++li) {
      std::int64_t rest = li;
      bool ok = true;
      for (int i = 0; i < pairs_; ++i) {
        lam[i] = static_cast<double>(rest % Ll) / (Ll - 1);
        rest /= Ll;
        if (lam[i] > 0 && !(rate[i] > 0)) ok = false;
      }
      if (!ok) continue;

      for (int k = 0; k < K && ok; ++k) {
        const TaskSpec& t = c_.tasks[k];
        double L = 0.0;
        for (int m = 0; m < M; ++m) L += lam[k * M + m];
        if (L > 1.0 + 1e-12) {
          ok = false;
          break;
        }
        const double cs = t.c_cycles_per_bit * t.s_bits;
        fl[k] = 0.0;
        double energy = 0.0;
        if (1.0 - L > 1e-12) {
          auto f = grid_frequency(cs * (1.0 - L) / t.T_max_s, t.F_local_Hz);
          if (!f) {
            ok = false;
            break;
          }
          fl[k] = *f;
          energy += t.eta * cs * (1.0 - L) * fl[k] * fl[k];
        }
        for (int m = 0; m < M && ok; ++m) {
          const int i = k * M + m;
          fm[i] = 0.0;
          if (!(lam[i] > 0)) continue;
          const double slack = t.T_max_s - t.s_bits * lam[i] / rate[i];
          if (!(slack > 0)) {
            ok = false;
            break;
          }
          auto f = grid_frequency(c_.c_mec_cycles_per_bit[m] * t.s_bits * lam[i] / slack,
                                  c_.F_mec_Hz[m]);
          if (!f) {
            ok = false;
            break;
          }
          fm[i] = *f;
          energy += t.s_bits * lam[i] / rate[i] * tx[i];
        }
        if (ok && energy > t.E_budget_J) ok = false;
      }
      for (int m = 0; m < M && ok; ++m) {
        double sum = 0.0;
        for (int k = 0; k < K; ++k) sum += fm[k * M + m];
        if (sum > c_.F_mec_Hz[m]) ok = false;
      }
      if (!ok) continue;

      for (int k = 0; k < K; ++k) {
        a.f_local[k] = fl[k];
        for (int m = 0; m < M; ++m) {
          a.Lambda(k, m) = lam[k * M + m];
          a.f_mec(k, m) = fm[k * M + m];
          a.Phi(k, m) = rate[k * M + m];
        }
      }
      return a;
    }
    return std::nullopt;
  }

  const SystemConfig& c_;
  const ChannelState& ch_;
  const GridSpec& g_;
  int pairs_;
  std::int64_t assignments_;
};

void guard(const SystemConfig& config, const GridSpec& grid) {
  config.validate();
  grid.validate();
  if (config.K * config.M > 2 || config.N > 3)
    throw std::length_error("brute_force: instance exceeds the enumeration budget (K*M <= 2, N <= 3)");
}

OracleResult finish(const SystemConfig& config, const ChannelState& channels, Best best) {
  OracleResult out;
  out.evaluated = best.evaluated;
  if (!best.found) return out;
  if (!check_feasibility(config, channels, best.alloc, 1e-6).feasible())
    throw std::logic_error("brute_force: grid optimum fails the feasibility check");
  out.feasible = true;
  out.objective = best.objective;
  out.allocation = std::move(best.alloc);
  return out;
}

}  // namespace

OracleResult brute_force_serial(const SystemConfig& config, const ChannelState& channels,
                                const GridSpec& grid) {
  guard(config, grid);
  const Search search(config, channels, grid);
  Best best;
  for (std::int64_t xi = 0; xi < search.assignments(); ++xi) search.scan(xi, best);
  return finish(config, channels, std::move(best));
}

OracleResult brute_force(const SystemConfig& config, const ChannelState& channels,
                         const GridSpec& grid) {
  guard(config, grid);
  const Search search(config, channels, grid);
  const std::int64_t n = search.assignments();
  // One slot per assignment, reduced in enumeration order so ties resolve as in
  // the serial scan.
  std::vector<Best> part(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t xi = 0; xi < n; ++xi) search.scan(xi, part[xi]);

  Best best;
  for (auto& p : part) {
    best.evaluated += p.evaluated;
    if (p.found && (!best.found || p.objective > best.objective)) {
      best.found = true;
      best.objective = p.objective;
      best.alloc = std::move(p.alloc);
    }
  }
  return finish(config, channels, std::move(best));
}

}  // namespace secmec
