#include <limits>

#include <doctest.h>

#include "fixtures.hpp"
#include "secmec/lp.hpp"

using namespace secmec;
using doctest::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// K = M = 1, one subcarrier at 1e5 bit/s, server at 1e8 Hz.
struct P1Case {
  SystemConfig config;
  ChannelState channels;
  Allocation alloc;

  explicit P1Case(double f_local) {
    config = test::system(1, 1, 1, test::task(1e4, 1000, 1.0, 100.0, 1.0, 1e9));
    channels = test::flat_channels(config, 1023.0, 0.0);
    alloc = Allocation::zeros(config);
    alloc.X[0] = UserServerPair{0, 0};
    alloc.Q(0, 0) = 1.0;
    alloc.f_local[0] = f_local;
    alloc.f_mec(0, 0) = 1e8;
    alloc.Phi(0, 0) = 1e5;
  }
};

}  // namespace

TEST_CASE("one-variable phase 1") {
  LinearFeasibilityProblem lp(1);
  lp.lower = {0.0};
  lp.upper = {kInf};
  lp.add_row({1.0}, 1.0);
  const auto sol = find_feasible(lp);
  REQUIRE(sol.feasible());
  CHECK(sol.x[0] >= -1e-12);
  CHECK(sol.x[0] <= 1.0 + 1e-12);

  LinearFeasibilityProblem bad(1);
  bad.lower = {0.0};
  bad.upper = {kInf};
  bad.add_row({1.0}, -1.0);
  CHECK_FALSE(find_feasible(bad).feasible());
}

TEST_CASE("phase 2 maximizes over a box and a cut") {
  LinearFeasibilityProblem lp(2);
  lp.lower = {0.0, 0.0};
  lp.upper = {1.0, 1.0};
  lp.add_row({1.0, 1.0}, 1.5);
  const double obj[] = {1.0, 2.0};
  const auto sol = maximize(lp, obj);
  REQUIRE(sol.feasible());
  CHECK(sol.x[0] == Approx(0.5));
  CHECK(sol.x[1] == Approx(1.0));
}

TEST_CASE("P1 with a slack local row admits the whole interval") {
  P1Case c(2e7);
  const auto lp = build_p1(c.config, c.channels, c.alloc);
  for (double lam : {0.0, 0.3, 1.0}) {
    const double x[] = {lam};
    CHECK(lp.max_violation(x) <= 1e-12);
  }
  const auto sol = solve_p1(lp, P1Mode::Central);
  REQUIRE(sol.feasible());
  CHECK(lp.max_violation(sol.x) <= 1e-9);
}

TEST_CASE("P1 with a slow local CPU forces offloading") {
  P1Case c(4.95e6);
  const auto lp = build_p1(c.config, c.channels, c.alloc);
  const double below[] = {0.5}, above[] = {0.51};
  CHECK(lp.max_violation(below) > 0.0);
  CHECK(lp.max_violation(above) <= 1e-12);
  for (P1Mode mode : {P1Mode::Vertex, P1Mode::MaxOffload, P1Mode::Central}) {
    const auto sol = solve_p1(lp, mode);
    REQUIRE(sol.feasible());
    CHECK(sol.x[0] >= 0.505 - 1e-9);
    CHECK(sol.x[0] <= 1.0 + 1e-9);
  }
}

TEST_CASE("P1 pins a pair without rate to zero") {
  P1Case c(4.95e6);
  c.channels = test::flat_channels(c.config, 0.5, 1.0);
  const auto lp = build_p1(c.config, c.channels, c.alloc);
  CHECK(lp.upper[0] == 0.0);
  CHECK_FALSE(solve_p1(lp, P1Mode::Central).feasible());
  CHECK(solve_p1(build_p1(P1Case(2e7).config, c.channels, P1Case(2e7).alloc), P1Mode::Central).feasible());
}

TEST_CASE("full offload adds a covering row") {
  P1Case c(2e7);
  P1Options opts;
  opts.full_offload = true;
  const auto sol = solve_p1(build_p1(c.config, c.channels, c.alloc, opts), P1Mode::Vertex);
  REQUIRE(sol.feasible());
  CHECK(sol.x[0] == Approx(1.0));
}

TEST_CASE("identical input gives an identical answer") {
  P1Case c(4.95e6);
  const auto lp = build_p1(c.config, c.channels, c.alloc);
  const auto a = solve_p1(lp, P1Mode::Central);
  const auto b = solve_p1(lp, P1Mode::Central);
  CHECK(a.x == b.x);
  CHECK(a.pivots == b.pivots);
}
