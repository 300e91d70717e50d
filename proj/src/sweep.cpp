#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include <omp.h>

#include "secmec/harness.hpp"

namespace secmec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Task {
  const ScenarioConfig* scenario;
  std::string axis;
  double axis_value;
  std::uint64_t seed;
  Scheme scheme;
};

RunRow run_task(const Task& t, const RunOptions& opts) {
  RunRow row;
  row.axis = t.axis;
  row.axis_value = t.axis_value;
  row.seed = t.seed;
  row.scheme = t.scheme;
  const auto start = std::chrono::steady_clock::now();
  try {
    ChannelConfig cc = t.scenario->channel;
    if (opts.deterministic_fading) cc.fading = FadingMode::Unit;
    row.channels = generate(cc, t.scenario->system, t.seed);
    SolveResult res = solve_scheme(t.scenario->system, row.channels, t.scenario->solver, t.scheme);
    row.feasible = res.feasible();
    row.converged = res.converged;
    row.iters = res.iterations;
    row.status = row.feasible ? "ok" : "infeasible";
    row.trace = std::move(res.trace);
    if (row.feasible) {
      row.metrics = std::move(res.metrics);
      row.allocation = std::move(res.allocation);
    }
  } catch (const std::exception& e) {
    row.feasible = false;
    row.status = std::string("error: ") + e.what();
  }
  if (opts.timing)
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<RunRow> run_tasks(const std::vector<Task>& tasks, const RunOptions& opts) {
  std::vector<RunRow> rows(tasks.size());
  const auto n = static_cast<std::int64_t>(tasks.size());
  if (!opts.parallel) {
    for (std::int64_t i = 0; i < n; ++i) rows[i] = run_task(tasks[i], opts);
    return rows;
  }
  const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) rows[i] = run_task(tasks[i], opts);
  return rows;
}

void add_tasks(std::vector<Task>& tasks, const ScenarioConfig& sc, const std::string& axis,
               double value) {
  for (std::uint64_t seed : sc.seeds)
    for (Scheme s : sc.schemes) tasks.push_back({&sc, axis, value, seed, s});
}

double csv_metric(const RunRow& r, double v) { return r.feasible ? v : kNaN; }

}  // namespace

std::vector<RunRow> run_scenario(const ScenarioConfig& scenario, const RunOptions& opts,
                                 const std::string& axis, double axis_value) {
  scenario.validate();
  std::vector<Task> tasks;
  add_tasks(tasks, scenario, axis, axis_value);
  return run_tasks(tasks, opts);
}

std::vector<RunRow> run_sweep(const SweepSpec& spec, const RunOptions& opts) {
  spec.validate();
  std::vector<ScenarioConfig> points;
  for (double v : spec.values) points.push_back(spec.at(v));
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < points.size(); ++i) add_tasks(tasks, points[i], axis_name(spec.axis), spec.values[i]);
  return run_tasks(tasks, opts);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_rows_csv(std::ostream& os, const std::vector<RunRow>& rows) {
  os << "axis_name,axis_value,seed,scheme,sum_secrecy_rate_bps,local_computing_ratio,"
        "mean_latency_s,mean_energy_J,converged,iters,wall_ms,status\n";
  for (const auto& r : rows) {
    os << r.axis << ',' << format_number(r.axis_value) << ',' << r.seed << ','
       << scheme_name(r.scheme) << ',' << format_number(csv_metric(r, r.metrics.sum_secrecy_rate_bps))
       << ',' << format_number(csv_metric(r, r.metrics.local_computing_ratio)) << ','
       << format_number(r.feasible ? r.metrics.mean_latency_s() : kNaN) << ','
       << format_number(r.feasible ? r.metrics.mean_energy_J() : kNaN) << ',' << (r.converged ? 1 : 0)
       << ',' << r.iters << ',' << format_number(r.wall_ms) << ',';
    // Commas and newlines in error text would break the unquoted format.
    for (char c : r.status) os << (c == ',' || c == '\n' || c == '\r' ? ';' : c);
    os << '\n';
  }
}

std::vector<SummaryRow> summarize(const std::vector<RunRow>& rows) {
  struct Acc {
    std::string axis;
    double value;
    Scheme scheme;
    std::vector<double> rate, lcr;
    int n = 0;
  };
  std::vector<Acc> groups;
  std::map<std::pair<double, int>, std::size_t> index;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.axis_value, static_cast<int>(r.scheme));
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, groups.size()).first;
      groups.push_back({r.axis, r.axis_value, r.scheme, {}, {}, 0});
    }
    Acc& a = groups[it->second];
    ++a.n;
    a.rate.push_back(r.feasible ? r.metrics.sum_secrecy_rate_bps : 0.0);
    if (r.feasible) a.lcr.push_back(r.metrics.local_computing_ratio);
  }

  auto mean = [](const std::vector<double>& v) {
    if (v.empty()) return kNaN;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto stddev = [&](const std::vector<double>& v) {
    if (v.size() < 2) return v.empty() ? kNaN : 0.0;
    const double mu = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
  };

  std::vector<SummaryRow> out;
  for (const auto& a : groups) {
    SummaryRow s;
    s.axis = a.axis;
    s.axis_value = a.value;
    s.scheme = a.scheme;
    s.n_seeds = a.n;
    s.n_feasible = static_cast<int>(a.lcr.size());
    s.mean_rate = mean(a.rate);
    s.std_rate = stddev(a.rate);
    s.mean_lcr = mean(a.lcr);
    s.std_lcr = stddev(a.lcr);
    s.gain_pa_pct = kNaN;
    out.push_back(s);
  }
  for (auto& s : out) {
    for (const auto& p : out) {
      if (p.scheme != Scheme::PA || p.axis_value != s.axis_value) continue;
      if (s.scheme == Scheme::PA) s.gain_pa_pct = 0.0;
      else if (s.mean_rate > 0) s.gain_pa_pct = (p.mean_rate - s.mean_rate) / s.mean_rate * 100.0;
    }
  }
  return out;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << "axis_name,axis_value,scheme,n_seeds,n_feasible,mean_rate_bps,std_rate_bps,"
        "mean_local_computing_ratio,std_local_computing_ratio,gain_pa_pct\n";
  for (const auto& s : rows)
    os << s.axis << ',' << format_number(s.axis_value) << ',' << scheme_name(s.scheme) << ','
       << s.n_seeds << ',' << s.n_feasible << ',' << format_number(s.mean_rate) << ','
       << format_number(s.std_rate) << ',' << format_number(s.mean_lcr) << ','
       << format_number(s.std_lcr) << ',' << format_number(s.gain_pa_pct) << '\n';
}

}  // namespace secmec
