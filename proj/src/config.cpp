#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "secmec/harness.hpp"

namespace secmec {

namespace {

using nlohmann::json;

enum class Dim { Power, Frequency, Time, Energy };

const std::map<std::string, double>& units(Dim d) {
  static const std::map<std::string, double> power{{"W", 1.0}, {"mW", 1e-3}};
  static const std::map<std::string, double> freq{{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
  static const std::map<std::string, double> time{{"s", 1.0}, {"ms", 1e-3}};
  static const std::map<std::string, double> energy{{"J", 1.0}, {"mJ", 1e-3}};
  switch (d) {
    case Dim::Power: return power;
    case Dim::Frequency: return freq;
    case Dim::Time: return time;
    case Dim::Energy: return energy;
  }
  return power;
}

// Reads one JSON object, remembering which keys were consumed so that leftovers
// can be reported as schema errors.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& key, const std::string& what) {
    throw ConfigError(key + ": " + what);
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    try {
      return v->get<T>();
    } catch (const json::exception&) {
      fail(where(key), "wrong type");
    }
  }

  // A value or array of values for base_<unit>; returns the raw JSON and the SI factor.
  std::pair<const json*, double> quantity(const std::string& base, Dim dim) {
    const json* found = nullptr;
    double factor = 1.0;
    for (const auto& [unit, f] : units(dim)) {
      const json* v = find(base + "_" + unit);
      if (!v) continue;
      if (found) fail(where(base), "given in more than one unit");
      found = v;
      factor = f;
    }
    return {found, factor};
  }

  // Scalar-or-array quantity expanded to n entries.
  std::vector<double> spread(const std::string& base, Dim dim, double fallback_si, std::size_t n) {
    auto [v, factor] = quantity(base, dim);
    return expand(v, factor, fallback_si, n, base);
  }

  std::vector<double> spread_plain(const std::string& key, double fallback, std::size_t n) {
    return expand(find(key), 1.0, fallback, n, key);
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (seen_.count(it.key())) continue;
      const std::string& k = it.key();
      const auto us = k.rfind('_');
      if (us != std::string::npos && known_bases().count(k.substr(0, us)))
        fail(where(k), "unknown unit suffix '" + k.substr(us + 1) + "'");
      fail(where(k), "unknown key");
    }
  }

 private:
  static const std::set<std::string>& known_bases() {
    static const std::set<std::string> b{"B", "sigma2", "F_local", "F_mec", "p_circuit", "p_max",
                                         "T_max", "E_budget", "values"};
    return b;
  }

  std::vector<double> expand(const json* v, double factor, double fallback_si, std::size_t n,
                             const std::string& base) const {
    if (!v) return std::vector<double>(n, fallback_si);
    try {
      if (v->is_array()) {
        if (v->size() != n)
          fail(where(base), "expected " + std::to_string(n) + " entries, got " + std::to_string(v->size()));
        std::vector<double> out;
        for (const auto& x : *v) out.push_back(x.get<double>() * factor);
        return out;
      }
      return std::vector<double>(n, v->get<double>() * factor);
    } catch (const json::exception&) {
      fail(where(base), "expected a number or an array of numbers");
    }
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

int positive_int(Reader& r, const std::string& key, int fallback) {
  const int v = r.get<int>(key, fallback);
  if (v < 1) Reader::fail(key, "must be >= 1");
  return v;
}

ChannelConfig parse_channel(const json& doc) {
  ChannelConfig c;
  Reader r(doc, "channel");
  c.beta0 = r.get("beta0", c.beta0);
  c.d0_m = r.get("d0_m", c.d0_m);
  c.pathloss_exp = r.get("pathloss_exp", c.pathloss_exp);
  c.eps = r.get("eps_per_W", c.eps);
  c.dist_min_m = r.get("dist_min_m", c.dist_min_m);
  c.dist_max_m = r.get("dist_max_m", c.dist_max_m);
  if (const json* d = r.find("dist_user_mec_m")) {
    try {
      const auto rows = d->get<std::vector<std::vector<double>>>();
      Matrix<double> m(rows.size(), rows.empty() ? 0 : rows[0].size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) Reader::fail("channel.dist_user_mec_m", "ragged rows");
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
      }
      c.dist_user_mec_m = std::move(m);
    } catch (const json::exception&) {
      Reader::fail("channel.dist_user_mec_m", "expected an array of arrays of numbers");
    }
  }
  if (const json* d = r.find("dist_user_eve_m")) {
    try {
      c.dist_user_eve_m = d->get<std::vector<double>>();
    } catch (const json::exception&) {
      Reader::fail("channel.dist_user_eve_m", "expected an array of numbers");
    }
  }
  const std::string fading = r.get<std::string>("fading", "rayleigh");
  if (fading == "rayleigh") c.fading = FadingMode::Rayleigh;
  else if (fading == "unit") c.fading = FadingMode::Unit;
  else Reader::fail("channel.fading", "expected 'rayleigh' or 'unit'");
  if (const json* rng = r.find("rng"); rng && *rng != ChannelConfig::kRngName)
    Reader::fail("channel.rng", std::string("only '") + ChannelConfig::kRngName + "' is available");
  r.finish();
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

SolverConfig parse_solver(const json& doc) {
  SolverConfig s;
  Reader r(doc, "solver");
  s.z_max = r.get("z_max", s.z_max);
  s.inner_max = r.get("inner_max", s.inner_max);
  s.dual_max = r.get("dual_max", s.dual_max);
  s.eps1 = r.get("eps1", s.eps1);
  s.step0 = r.get("step0", s.step0);
  const std::string rule = r.get<std::string>("step_rule", "diminishing");
  if (rule == "diminishing") s.step_rule = StepRule::Diminishing;
  else if (rule == "constant") s.step_rule = StepRule::Constant;
  else Reader::fail("solver.step_rule", "expected 'diminishing' or 'constant'");
  s.dual_tol = r.get("dual_tol", s.dual_tol);
  s.mu_floor = r.get("mu_floor", s.mu_floor);
  s.psi_floor = r.get("psi_floor", s.psi_floor);
  s.secant_tol = r.get("secant_tol", s.secant_tol);
  s.secant_max_iter = r.get("secant_max_iter", s.secant_max_iter);
  s.tol_rel = r.get("tol_rel", s.tol_rel);
  const std::string mode = r.get<std::string>("p1_mode", "central");
  if (mode == "central") s.p1_mode = P1Mode::Central;
  else if (mode == "vertex") s.p1_mode = P1Mode::Vertex;
  else if (mode == "max_offload") s.p1_mode = P1Mode::MaxOffload;
  else Reader::fail("solver.p1_mode", "expected 'central', 'vertex' or 'max_offload'");
  s.epa_one_shot = r.get("epa_one_shot", s.epa_one_shot);
  s.baseline_starts = r.get("baseline_starts", s.baseline_starts);
  r.finish();
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

std::vector<std::uint64_t> parse_seeds(const json& v) {
  std::vector<std::uint64_t> out;
  try {
    if (v.is_array()) return v.get<std::vector<std::uint64_t>>();
    if (v.is_object()) {
      const auto from = v.at("from").get<std::uint64_t>();
      const auto to = v.at("to").get<std::uint64_t>();
      if (v.size() != 2 || to < from) Reader::fail("seeds", "expected {\"from\": a, \"to\": b} with a <= b");
      for (std::uint64_t s = from; s <= to; ++s) out.push_back(s);
      return out;
    }
  } catch (const json::exception&) {
  }
  Reader::fail("seeds", "expected an array of integers or {\"from\", \"to\"}");
}

ScenarioConfig parse_into(Reader& r) {
  ScenarioConfig sc;
  SystemConfig& sys = sc.system;
  if (const json* d = r.find("description"); d && !d->is_string()) Reader::fail("description", "expected a string");
  sys.K = positive_int(r, "K", 5);
  sys.N = positive_int(r, "N", 64);
  sys.M = positive_int(r, "M", 3);
  const auto K = static_cast<std::size_t>(sys.K);
  const auto M = static_cast<std::size_t>(sys.M);

  auto scalar = [&](const std::string& base, Dim dim, double fallback) {
    auto [v, factor] = r.quantity(base, dim);
    if (!v) return fallback;
    if (!v->is_number()) Reader::fail(base, "expected a number");
    return v->get<double>() * factor;
  };
  sys.B_Hz = scalar("B", Dim::Frequency, 12.5e3);
  sys.sigma2_W = scalar("sigma2", Dim::Power, 1e-13);
  sys.F_mec_Hz = r.spread("F_mec", Dim::Frequency, 1.1e9, M);
  sys.c_mec_cycles_per_bit = r.spread_plain("c_mec_cycles_per_bit", 1100.0, M);

  const auto s = r.spread_plain("s_bits", 9e5, K);
  const auto c = r.spread_plain("c_cycles_per_bit", 1100.0, K);
  const auto eta = r.spread_plain("eta", 1e-24, K);
  const auto T = r.spread("T_max", Dim::Time, 0.2, K);
  const auto E = r.spread("E_budget", Dim::Energy, 100.0, K);
  const auto pmax = r.spread("p_max", Dim::Power, 1.0, K);
  const auto pc = r.spread("p_circuit", Dim::Power, std::pow(10.0, -0.3) * 1e-3, K);
  const auto F = r.spread("F_local", Dim::Frequency, 0.7e9, K);
  for (std::size_t k = 0; k < K; ++k)
    sys.tasks.push_back(TaskSpec{s[k], c[k], T[k], E[k], pmax[k], pc[k], F[k], eta[k]});

  if (const json* ch = r.find("channel")) sc.channel = parse_channel(*ch);
  if (const json* so = r.find("solver")) sc.solver = parse_solver(*so);

  if (const json* seeds = r.find("seeds")) {
    sc.seeds = parse_seeds(*seeds);
  } else {
    for (std::uint64_t i = 0; i < 50; ++i) sc.seeds.push_back(i);
  }
  if (const json* schemes = r.find("schemes")) {
    if (!schemes->is_array()) Reader::fail("schemes", "expected an array of scheme names");
    for (const auto& name : *schemes) {
      try {
        sc.schemes.push_back(scheme_from_name(name.get<std::string>()));
      } catch (const std::exception& e) {
        Reader::fail("schemes", e.what());
      }
    }
  } else {
    sc.schemes = {Scheme::PA, Scheme::EPA, Scheme::FO};
  }
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return sc;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  system.validate();
  channel.validate();
  solver.validate();
  if (seeds.empty()) throw std::invalid_argument("scenario: seeds must be nonempty");
  if (schemes.empty()) throw std::invalid_argument("scenario: schemes must be nonempty");
}

const char* axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::T_max: return "T_max";
    case SweepAxis::p_max: return "p_max";
    case SweepAxis::M: return "M";
  }
  return "?";
}

void SweepSpec::validate() const {
  base.validate();
  if (values.empty()) throw std::invalid_argument("sweep: values must be nonempty");
  const bool up = values.size() < 2 || values[1] > values[0];
  for (std::size_t i = 1; i < values.size(); ++i)
    if (up ? !(values[i] > values[i - 1]) : !(values[i] < values[i - 1]))
      throw std::invalid_argument("sweep: values must be strictly monotone");
  for (double v : values) {
    if (!(v > 0)) throw std::invalid_argument("sweep: values must be positive");
    if (axis == SweepAxis::M && v != std::floor(v))
      throw std::invalid_argument("sweep: server counts must be integers");
  }
}

ScenarioConfig SweepSpec::at(double value) const {
  ScenarioConfig sc = base;
  switch (axis) {
    case SweepAxis::T_max:
      for (auto& t : sc.system.tasks) t.T_max_s = value;
      break;
    case SweepAxis::p_max:
      for (auto& t : sc.system.tasks) t.p_max_W = value;
      break;
    case SweepAxis::M: {
      const auto M = static_cast<std::size_t>(value);
      // Servers beyond the base list repeat its last entry.
      auto resize = [M](std::vector<double>& v) { v.resize(M, v.back()); };
      resize(sc.system.F_mec_Hz);
      resize(sc.system.c_mec_cycles_per_bit);
      sc.system.M = static_cast<int>(M);
      if (sc.channel.dist_user_mec_m && sc.channel.dist_user_mec_m->cols() < M)
        throw std::invalid_argument("sweep: dist_user_mec_m lists fewer servers than the sweep needs");
      break;
    }
  }
  return sc;
}

ScenarioConfig parse_config(const json& doc) {
  Reader r(doc, "");
  ScenarioConfig sc = parse_into(r);
  r.finish();
  return sc;
}

ScenarioConfig load_config(const std::string& path) { return parse_config(read_json(path)); }

SweepSpec parse_sweep(const json& doc) {
  Reader r(doc, "");
  SweepSpec spec;
  const json* sweep = r.find("sweep");
  if (!sweep) Reader::fail("sweep", "missing");
  spec.base = parse_into(r);
  r.finish();

  Reader sr(*sweep, "sweep");
  const std::string axis = sr.get<std::string>("axis", "");
  Dim dim = Dim::Time;
  if (axis == "T_max") spec.axis = SweepAxis::T_max, dim = Dim::Time;
  else if (axis == "p_max") spec.axis = SweepAxis::p_max, dim = Dim::Power;
  else if (axis == "M") spec.axis = SweepAxis::M;
  else Reader::fail("sweep.axis", "expected 'T_max', 'p_max' or 'M'");

  const json* values = nullptr;
  double factor = 1.0;
  if (spec.axis == SweepAxis::M) {
    values = sr.find("values");
  } else {
    std::tie(values, factor) = sr.quantity("values", dim);
  }
  if (!values || !values->is_array()) Reader::fail("sweep.values", "missing or not an array");
  try {
    for (const auto& v : *values) spec.values.push_back(v.get<double>() * factor);
  } catch (const json::exception&) {
    Reader::fail("sweep.values", "expected numbers");
  }
  sr.finish();
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

SweepSpec load_sweep(const std::string& path) { return parse_sweep(read_json(path)); }

PrecheckReport precheck(const SystemConfig& system) {
  PrecheckReport rep;
  double F_servers = 0.0, F_users = 0.0, T = 0.0;
  for (double f : system.F_mec_Hz) F_servers += f;
  for (const auto& t : system.tasks) {
    F_users += t.F_local_Hz;
    T = std::max(T, t.T_max_s);
    rep.required_cycles += t.c_cycles_per_bit * t.s_bits;
  }
  rep.available_cycles = T * (F_users + F_servers);
  rep.pass = rep.required_cycles <= rep.available_cycles;
  for (const auto& t : system.tasks) {
    UserBudget u;
    u.required_cycles = t.c_cycles_per_bit * t.s_bits;
    u.available_cycles = t.T_max_s * (t.F_local_Hz + F_servers);
    rep.pass = rep.pass && u.required_cycles <= u.available_cycles;
    rep.users.push_back(u);
  }
  return rep;
}

std::string PrecheckReport::describe() const {
  std::ostringstream os;
  os << (pass ? "PASS" : "FAIL") << ": cycles required " << required_cycles << ", available "
     << available_cycles << " (margin " << available_cycles - required_cycles << ")\n";
  for (std::size_t k = 0; k < users.size(); ++k)
    os << "  user " << k << ": required " << users[k].required_cycles << ", available "
       << users[k].available_cycles << "\n";
  return os.str();
}

}  // namespace secmec
