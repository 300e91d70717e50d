#include "secmec/channel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace secmec {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class LinkKind : std::uint64_t { UserMec = 1, UserEve = 2 };

std::mt19937_64 link_stream(std::uint64_t seed, LinkKind kind, int k, int m) {
  std::uint64_t key = splitmix64(seed);
  key = splitmix64(key ^ static_cast<std::uint64_t>(kind));
  key = splitmix64(key ^ static_cast<std::uint64_t>(k));
  key = splitmix64(key ^ static_cast<std::uint64_t>(m));
  return std::mt19937_64(key);
}

// Uniform in [0, 1) with 53 random bits.
double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace

void ChannelConfig::validate() const {
  if (!(beta0 > 0)) throw std::invalid_argument("channel: beta0 must be > 0");
  if (!(d0_m > 0)) throw std::invalid_argument("channel: d0_m must be > 0");
  if (!(pathloss_exp > 0)) throw std::invalid_argument("channel: pathloss_exp must be > 0");
  if (!(eps >= 0)) throw std::invalid_argument("channel: eps must be >= 0");
  if (!(dist_min_m >= d0_m) || !(dist_max_m >= dist_min_m))
    throw std::invalid_argument("channel: distance range must satisfy d0 <= min <= max");
}

double pathloss_gain(const ChannelConfig& config, double distance_m) {
  if (distance_m < config.d0_m)
    throw std::domain_error("pathloss_gain: distance below reference distance");
  return config.beta0 * std::pow(distance_m / config.d0_m, -config.pathloss_exp);
}

double exponential_from_bits(std::uint64_t bits) { return -std::log1p(-unit_uniform(bits)); }

ChannelState generate(const ChannelConfig& config, const SystemConfig& system,
                      std::uint64_t seed) {
  config.validate();
  if (config.dist_user_mec_m &&
      (config.dist_user_mec_m->rows() != static_cast<std::size_t>(system.K) ||
       config.dist_user_mec_m->cols() < static_cast<std::size_t>(system.M)))
    throw std::invalid_argument("channel: dist_user_mec_m dimensions do not match K x M");
  if (config.dist_user_eve_m && config.dist_user_eve_m->size() != static_cast<std::size_t>(system.K))
    throw std::invalid_argument("channel: dist_user_eve_m must have K entries");

  ChannelState st(system.K, system.N, system.M, config.eps, system.sigma2_W);
  const double span = config.dist_max_m - config.dist_min_m;

  auto fill = [&](std::mt19937_64& rng, std::optional<double> listed, auto&& store) {
    const double drawn = config.dist_min_m + span * unit_uniform(rng());
    const double d = listed.value_or(drawn);
    const double mean_ratio = pathloss_gain(config, d) / system.sigma2_W;
    for (int n = 0; n < system.N; ++n) {
      const std::uint64_t bits = rng();
      const double fading = config.fading == FadingMode::Rayleigh ? exponential_from_bits(bits) : 1.0;
      store(n, mean_ratio * fading);
    }
  };

  for (int k = 0; k < system.K; ++k) {
    for (int m = 0; m < system.M; ++m) {
      auto rng = link_stream(seed, LinkKind::UserMec, k, m);
      std::optional<double> listed;
      if (config.dist_user_mec_m) listed = (*config.dist_user_mec_m)(k, m);
      fill(rng, listed, [&](int n, double v) { st.h(k, n, m) = v; });
    }
    auto rng = link_stream(seed, LinkKind::UserEve, k, 0);
    std::optional<double> listed;
    if (config.dist_user_eve_m) listed = (*config.dist_user_eve_m)[k];
    fill(rng, listed, [&](int n, double v) { st.g(k, n) = v; });
  }
  return st;
}

nlohmann::json channel_to_json(const ChannelState& state) {
  nlohmann::json h = nlohmann::json::array();
  nlohmann::json g = nlohmann::json::array();
  for (int k = 0; k < state.K; ++k) {
    nlohmann::json hk = nlohmann::json::array();
    nlohmann::json gk = nlohmann::json::array();
    for (int n = 0; n < state.N; ++n) {
      nlohmann::json hkn = nlohmann::json::array();
      for (int m = 0; m < state.M; ++m) hkn.push_back(state.h(k, n, m));
      hk.push_back(std::move(hkn));
      gk.push_back(state.g(k, n));
    }
    h.push_back(std::move(hk));
    g.push_back(std::move(gk));
  }
  return {{"schema", "secmec.channel/1"}, {"K", state.K},         {"N", state.N},
          {"M", state.M},                 {"eps_per_W", state.eps}, {"sigma2_W", state.sigma2_W},
          {"h_tilde", std::move(h)},       {"g_bar", std::move(g)}};
}

ChannelState channel_from_json(const nlohmann::json& doc) {
  if (doc.value("schema", "") != "secmec.channel/1")
    throw std::invalid_argument("channel fixture: unknown schema");
  ChannelState st(doc.at("K").get<int>(), doc.at("N").get<int>(), doc.at("M").get<int>(),
                  doc.at("eps_per_W").get<double>(), doc.at("sigma2_W").get<double>());
  const auto& h = doc.at("h_tilde");
  const auto& g = doc.at("g_bar");
  for (int k = 0; k < st.K; ++k)
    for (int n = 0; n < st.N; ++n) {
      st.g(k, n) = g.at(k).at(n).get<double>();
      for (int m = 0; m < st.M; ++m) st.h(k, n, m) = h.at(k).at(n).at(m).get<double>();
    }
  return st;
}

}  // namespace secmec
