#include "secmec/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace secmec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-12;

// Dense tableau in equality form with a reduced-cost row for maximization.
class Tableau {
 public:
  Tableau(int rows, int cols) : rows_(rows), cols_(cols), a_(rows * (cols + 1), 0.0), basis_(rows, -1) {}

  double& at(int i, int j) { return a_[i * (cols_ + 1) + j]; }
  double at(int i, int j) const { return a_[i * (cols_ + 1) + j]; }
  double& rhs(int i) { return at(i, cols_); }
  double rhs(int i) const { return at(i, cols_); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::vector<int>& basis() { return basis_; }
  const std::vector<int>& basis() const { return basis_; }

  void set_costs(const std::vector<double>& c) {
    cost_ = c;
    reduced_.assign(cols_, 0.0);
    for (int j = 0; j < cols_; ++j) {
      double r = c[j];
      for (int i = 0; i < rows_; ++i) r -= c[basis_[i]] * at(i, j);
      reduced_[j] = r;
    }
  }

  void pivot(int r, int c) {
    const double p = at(r, c);
    for (int j = 0; j <= cols_; ++j) at(r, j) /= p;
    for (int i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (int j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    const double f = reduced_[c];
    if (f != 0.0) {
      for (int j = 0; j < cols_; ++j) reduced_[j] -= f * at(r, j);
      reduced_[c] = 0.0;
    }
    basis_[r] = c;
  }

  enum class Outcome { Optimal, Unbounded };

  Outcome run(const std::vector<bool>& allowed, const LpOptions& opts, int& pivots) {
    for (;;) {
      const bool bland = pivots >= opts.bland_after;
      int enter = -1;
      double best = opts.tol;
      for (int j = 0; j < cols_; ++j) {
        if (!allowed[j] || !(reduced_[j] > opts.tol)) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (reduced_[j] > best) {
          best = reduced_[j];
          enter = j;
        }
      }
      if (enter < 0) return Outcome::Optimal;

      int leave = -1;
      double ratio = kInf;
      for (int i = 0; i < rows_; ++i) {
        const double a = at(i, enter);
        if (!(a > kPivotTol)) continue;
        const double q = rhs(i) / a;
        if (q < ratio - 1e-15 || (std::abs(q - ratio) <= 1e-15 && leave >= 0 && basis_[i] < basis_[leave])) {
          ratio = q;
          leave = i;
        }
      }
      if (leave < 0) return Outcome::Unbounded;
      if (++pivots > opts.max_pivots) throw std::runtime_error("simplex: pivot limit exceeded");
      pivot(leave, enter);
    }
  }

 private:
  int rows_;
  int cols_;
  std::vector<double> a_;
  std::vector<int> basis_;
  std::vector<double> cost_;
  std::vector<double> reduced_;
};

struct Standardized {
  int n = 0;                              // structural columns (shifted x - lower)
  std::vector<std::vector<double>> rows;  // normalized, shifted rows
  std::vector<double> rhs;
};

Standardized standardize(const LinearFeasibilityProblem& lp, bool& trivially_infeasible,
                         double tol) {
  Standardized s;
  s.n = lp.n_vars;
  trivially_infeasible = false;
  auto push = [&](std::vector<double> row, double b) {
    double scale = 0.0;
    for (double v : row) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) {
      if (b < -tol) trivially_infeasible = true;
      return;
    }
    for (double& v : row) v /= scale;
    s.rows.push_back(std::move(row));
    s.rhs.push_back(b / scale);
  };
  for (std::size_t i = 0; i < lp.A_ub.size(); ++i) {
    double b = lp.b_ub[i];
    for (int j = 0; j < lp.n_vars; ++j) b -= lp.A_ub[i][j] * lp.lower[j];
    push(lp.A_ub[i], b);
  }
  for (int j = 0; j < lp.n_vars; ++j) {
    if (std::isinf(lp.upper[j])) continue;
    std::vector<double> row(lp.n_vars, 0.0);
    row[j] = 1.0;
    push(std::move(row), lp.upper[j] - lp.lower[j]);
  }
  return s;
}

LpSolution solve(const LinearFeasibilityProblem& lp, const std::vector<double>* objective,
                 const LpOptions& opts) {
  lp.validate();
  LpSolution out;
  bool trivially_infeasible = false;
  const Standardized s = standardize(lp, trivially_infeasible, opts.tol);
  if (trivially_infeasible) {
    out.status = LpStatus::Infeasible;
    out.phase1_residual = kInf;
    return out;
  }

  const int m = static_cast<int>(s.rows.size());
  const int n = s.n;
  int n_art = 0;
  for (double b : s.rhs)
    if (b < 0) ++n_art;
  const int cols = n + m + n_art;
  Tableau tab(m, cols);
  int art = n + m;
  std::vector<bool> is_art(cols, false);
  for (int i = 0; i < m; ++i) {
    const double sign = s.rhs[i] < 0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) tab.at(i, j) = sign * s.rows[i][j];
    tab.at(i, n + i) = sign;
    tab.rhs(i) = sign * s.rhs[i];
    if (sign < 0) {
      tab.at(i, art) = 1.0;
      is_art[art] = true;
      tab.basis()[i] = art++;
    } else {
      tab.basis()[i] = n + i;
    }
  }

  std::vector<double> c1(cols, 0.0);
  for (int j = 0; j < cols; ++j)
    if (is_art[j]) c1[j] = -1.0;
  tab.set_costs(c1);
  std::vector<bool> allowed(cols, true);
  if (tab.run(allowed, opts, out.pivots) == Tableau::Outcome::Unbounded)
    throw std::logic_error("simplex: phase 1 cannot be unbounded");

  double residual = 0.0;
  for (int i = 0; i < m; ++i)
    if (is_art[tab.basis()[i]]) residual += tab.rhs(i);
  out.phase1_residual = residual;
  if (residual > opts.tol) {
    out.status = LpStatus::Infeasible;
    return out;
  }

  // Drive zero-level artificials out of the basis where a real column allows it.
  for (int i = 0; i < m; ++i) {
    if (!is_art[tab.basis()[i]]) continue;
    for (int j = 0; j < n + m; ++j) {
      if (std::abs(tab.at(i, j)) > 1e-9) {
        tab.pivot(i, j);
        break;
      }
    }
  }
  for (int j = 0; j < cols; ++j)
    if (is_art[j]) allowed[j] = false;

  if (objective) {
    std::vector<double> c2(cols, 0.0);
    for (int j = 0; j < n; ++j) c2[j] = (*objective)[j];
    tab.set_costs(c2);
    if (tab.run(allowed, opts, out.pivots) == Tableau::Outcome::Unbounded)
      throw std::runtime_error("simplex: objective is unbounded");
  }

  out.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i) {
    const int b = tab.basis()[i];
    if (b < n) out.x[b] = std::max(tab.rhs(i), 0.0);
  }
  for (int j = 0; j < n; ++j) {
    out.x[j] += lp.lower[j];
    out.x[j] = std::min(out.x[j], lp.upper[j]);
  }
  out.status = LpStatus::Feasible;
  return out;
}

}  // namespace

LinearFeasibilityProblem::LinearFeasibilityProblem(int n)
    : n_vars(n), lower(n, 0.0), upper(n, kInf) {}

void LinearFeasibilityProblem::add_row(std::vector<double> coeffs, double bound, std::string label) {
  if (static_cast<int>(coeffs.size()) != n_vars)
    throw std::invalid_argument("lp: row length does not match variable count");
  A_ub.push_back(std::move(coeffs));
  b_ub.push_back(bound);
  row_labels.push_back(std::move(label));
}

void LinearFeasibilityProblem::validate() const {
  if (A_ub.size() != b_ub.size()) throw std::invalid_argument("lp: A_ub and b_ub differ in length");
  if (static_cast<int>(lower.size()) != n_vars || static_cast<int>(upper.size()) != n_vars)
    throw std::invalid_argument("lp: bounds do not match variable count");
  for (int j = 0; j < n_vars; ++j) {
    if (!std::isfinite(lower[j])) throw std::invalid_argument("lp: lower bounds must be finite");
    if (lower[j] > upper[j]) throw std::invalid_argument("lp: lower bound exceeds upper bound");
  }
  for (const auto& row : A_ub)
    if (static_cast<int>(row.size()) != n_vars) throw std::invalid_argument("lp: ragged A_ub");
}

double LinearFeasibilityProblem::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < A_ub.size(); ++i) {
    double lhs = 0.0;
    for (int j = 0; j < n_vars; ++j) lhs += A_ub[i][j] * x[j];
    worst = std::max(worst, lhs - b_ub[i]);
  }
  for (int j = 0; j < n_vars; ++j) {
    worst = std::max(worst, lower[j] - x[j]);
    worst = std::max(worst, x[j] - upper[j]);
  }
  return worst;
}

LpSolution find_feasible(const LinearFeasibilityProblem& lp, const LpOptions& opts) {
  return solve(lp, nullptr, opts);
}

LpSolution maximize(const LinearFeasibilityProblem& lp, std::span<const double> objective,
                    const LpOptions& opts) {
  if (static_cast<int>(objective.size()) != lp.n_vars)
    throw std::invalid_argument("lp: objective length does not match variable count");
  std::vector<double> c(objective.begin(), objective.end());
  return solve(lp, &c, opts);
}

LinearFeasibilityProblem build_p1(const SystemConfig& config, const ChannelState& channels,
                                  const Allocation& alloc, const P1Options& opts) {
  const int K = config.K;
  const int M = config.M;
  LinearFeasibilityProblem lp(K * M);
  for (int j = 0; j < K * M; ++j) lp.upper[j] = 1.0;

  for (int k = 0; k < K; ++k) {
    const TaskSpec& task = config.tasks[k];
    const double cs = task.c_cycles_per_bit * task.s_bits;
    const double f_l = alloc.f_local[k];
    std::vector<double> rates(M), tx_power(M);
    for (int m = 0; m < M; ++m) {
      rates[m] = pair_rate(config, channels, alloc, k, m, RateClip::Clipped);
      tx_power[m] = pair_tx_power(config, alloc, k, m);
      if (!(rates[m] > 0) || !(alloc.f_mec(k, m) > 0)) lp.upper[k * M + m] = 0.0;
    }
    auto user_row = [&](double coeff) {
      std::vector<double> row(K * M, 0.0);
      for (int m = 0; m < M; ++m) row[k * M + m] = coeff;
      return row;
    };

    // c s (1 - sum) / f_l <= T
    if (f_l > 0) {
      lp.add_row(user_row(-cs / f_l), task.T_max_s - cs / f_l, "local_latency");
    } else {
      lp.add_row(user_row(-1.0), -1.0, "local_latency");
    }
    // (s / r + c_m s / f_m) lambda <= T
    for (int m = 0; m < M; ++m) {
      if (lp.upper[k * M + m] == 0.0) continue;
      std::vector<double> row(K * M, 0.0);
      row[k * M + m] = task.s_bits / rates[m] +
                       config.c_mec_cycles_per_bit[m] * task.s_bits / alloc.f_mec(k, m);
      lp.add_row(std::move(row), task.T_max_s, "offload_latency");
    }
    // eta c s f^2 (1 - sum) + sum_m s P_m / r_m lambda_m <= E
    const double local_per_unit = task.eta * cs * f_l * f_l;
    std::vector<double> energy(K * M, 0.0);
    for (int m = 0; m < M; ++m) {
      const double per_unit = rates[m] > 0 ? task.s_bits * tx_power[m] / rates[m] : 0.0;
      energy[k * M + m] = per_unit - local_per_unit;
    }
    lp.add_row(std::move(energy), task.E_budget_J - local_per_unit, "energy");
    lp.add_row(user_row(1.0), 1.0, "simplex");
    if (opts.full_offload) lp.add_row(user_row(-1.0), -1.0, "full_offload");
  }
  return lp;
}

LpSolution solve_p1(const LinearFeasibilityProblem& lp, P1Mode mode, const LpOptions& opts) {
  LpSolution base = find_feasible(lp, opts);
  if (!base.feasible() || mode == P1Mode::Vertex) return base;

  if (mode == P1Mode::MaxOffload) {
    std::vector<double> c(lp.n_vars, 1.0);
    return maximize(lp, c, opts);
  }

  // Append a slack variable t and maximize it.
  const int n = lp.n_vars;
  LinearFeasibilityProblem ext(n + 1);
  for (int j = 0; j < n; ++j) {
    ext.lower[j] = lp.lower[j];
    ext.upper[j] = lp.upper[j];
  }
  ext.lower[n] = -1.0;
  ext.upper[n] = 1.0;
  for (std::size_t i = 0; i < lp.A_ub.size(); ++i) {
    double scale = std::abs(lp.b_ub[i]);
    for (double v : lp.A_ub[i]) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) continue;
    std::vector<double> row(n + 1);
    for (int j = 0; j < n; ++j) row[j] = lp.A_ub[i][j] / scale;
    row[n] = 1.0;
    ext.add_row(std::move(row), lp.b_ub[i] / scale, lp.row_labels[i]);
  }
  for (int j = 0; j < n; ++j) {
    if (!(lp.upper[j] > lp.lower[j])) continue;
    const double width = std::isinf(lp.upper[j]) ? 1.0 : lp.upper[j] - lp.lower[j];
    std::vector<double> row(n + 1, 0.0);
    row[j] = -1.0 / width;
    row[n] = 1.0;
    ext.add_row(std::move(row), -lp.lower[j] / width, "interior");
  }
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  LpSolution central = maximize(ext, c, opts);
  if (!central.feasible() || central.x[n] < 0.0) return base;
  central.x.resize(n);
  return central;
}

}  // namespace secmec
