#include <cmath>

#include <doctest.h>

#include "fixtures.hpp"
#include "secmec/channel.hpp"

using namespace secmec;
using doctest::Approx;

namespace {

SystemConfig small_system(int K, int M, int N) {
  SystemConfig c = test::system(K, M, N, test::task(1e5, 1100, 0.5, 5, 1, 7e8));
  c.sigma2_W = 1e-13;
  return c;
}

}  // namespace

TEST_CASE("pathloss law") {
  ChannelConfig cc;
  CHECK(pathloss_gain(cc, 1.0) == Approx(1e-3));
  CHECK(pathloss_gain(cc, 10.0) == Approx(7.943e-6).epsilon(1e-4));
}

TEST_CASE("unit fading at the reference distance gives beta0 over the noise") {
  ChannelConfig cc;
  cc.fading = FadingMode::Unit;
  cc.dist_user_mec_m = Matrix<double>(1, 1, 1.0);
  cc.dist_user_eve_m = std::vector<double>{10.0};
  const SystemConfig sys = small_system(1, 1, 3);
  const ChannelState ch = generate(cc, sys, 7);
  for (int n = 0; n < 3; ++n) {
    CHECK(ch.h(0, n, 0) == Approx(1e-3 / sys.sigma2_W));
    CHECK(ch.g(0, n) == Approx(7.943e-6 / sys.sigma2_W).epsilon(1e-4));
  }
  CHECK(ch.eps == cc.eps);
}

TEST_CASE("same seed gives identical draws, different seeds differ") {
  ChannelConfig cc;
  const SystemConfig sys = small_system(3, 2, 8);
  const ChannelState a = generate(cc, sys, 11);
  const ChannelState b = generate(cc, sys, 11);
  const ChannelState c = generate(cc, sys, 12);
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("smaller scenarios see a prefix of larger ones") {
  ChannelConfig cc;
  const ChannelState big = generate(cc, small_system(3, 3, 16), 5);
  const ChannelState small = generate(cc, small_system(2, 1, 8), 5);
  for (int k = 0; k < 2; ++k)
    for (int n = 0; n < 8; ++n) {
      CHECK(small.h(k, n, 0) == big.h(k, n, 0));
      CHECK(small.g(k, n) == big.g(k, n));
    }
}

TEST_CASE("fading draws have unit mean") {
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += exponential_from_bits(0x9E3779B97F4A7C15ull * (i + 1));
  CHECK(sum / n == Approx(1.0).epsilon(0.01));
  CHECK(exponential_from_bits(0) >= 0.0);
}

TEST_CASE("json round trip is exact") {
  ChannelConfig cc;
  const ChannelState a = generate(cc, small_system(2, 2, 4), 3);
  CHECK(channel_from_json(channel_to_json(a)) == a);
}

TEST_CASE("bad channel config is rejected") {
  ChannelConfig cc;
  cc.dist_min_m = 60.0;
  cc.dist_max_m = 50.0;
  CHECK_THROWS(cc.validate());
  cc = ChannelConfig{};
  cc.eps = -1.0;
  CHECK_THROWS(cc.validate());
}
