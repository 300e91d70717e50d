#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "secmec/model.hpp"

namespace secmec {

enum class FadingMode { Rayleigh, Unit };

/// Pathloss-plus-fading channel law. Gains are beta0 * (d / d0)^-exponent times a
/// unit-mean exponential power draw (Rayleigh amplitude) or 1 in unit mode.
///
/// Random streams: one std::mt19937_64 per link, seeded with
/// splitmix64-derived keys from (seed, link kind, user, server). Each stream
/// first yields the link distance (uniform in [dist_min_m, dist_max_m] unless
/// listed explicitly; the draw is consumed either way), then one fading draw
/// per subcarrier. Streams are independent of K, M and N, so a scenario with
/// fewer servers or subcarriers sees a prefix of a larger one.
struct ChannelConfig {
  static constexpr const char* kRngName = "mt19937_64+splitmix64/v1";

  double beta0 = 1e-3;
  double d0_m = 1.0;
  double pathloss_exp = 2.1;
  double eps = 2.5e5;  // 1/W
  double dist_min_m = 50.0;
  double dist_max_m = 55.0;
  std::optional<Matrix<double>> dist_user_mec_m;       // [K][M]
  std::optional<std::vector<double>> dist_user_eve_m;  // [K]
  FadingMode fading = FadingMode::Rayleigh;

  void validate() const;
};

/// Average channel power gain at distance d (dimensionless).
double pathloss_gain(const ChannelConfig& config, double distance_m);

/// One unit-mean exponential draw from a raw 64-bit word.
double exponential_from_bits(std::uint64_t bits);

ChannelState generate(const ChannelConfig& config, const SystemConfig& system,
                      std::uint64_t seed);

nlohmann::json channel_to_json(const ChannelState& state);
ChannelState channel_from_json(const nlohmann::json& doc);

}  // namespace secmec
