#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spider/simulator.hpp"

using namespace spider;

namespace {

SpiderModel bm2(double r) { return brownian_spider(2, {0.5, 0.5}, r); }

LegFunction linear_payoff() {
  LegFunction g;
  g.eval = [](double x, int) { return x; };
  return g;
}

}  // namespace

TEST_CASE("identical seed and config give bit-identical estimates") {
  auto m = bm2(0.5);
  SimConfig cfg;
  cfg.step = 0.05;
  cfg.paths = 2000;
  cfg.seed = 99;
  auto a = simulate_hitting_laplace(m, vertex(), {1.0, 1}, cfg);
  auto b = simulate_hitting_laplace(m, vertex(), {1.0, 1}, cfg);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  cfg.parallel = false;
  auto serial = simulate_hitting_laplace(m, vertex(), {1.0, 1}, cfg);
  CHECK(serial.mean == a.mean);  // thread count must not affect the result
  cfg.seed = 100;
  auto c = simulate_hitting_laplace(m, vertex(), {1.0, 1}, cfg);
  CHECK(c.mean != a.mean);
}

TEST_CASE("stopping everywhere returns the payoff exactly") {
  auto m = bm2(0.5);
  SimConfig cfg;
  cfg.paths = 50;
  auto est = simulate_discounted_stop(m, {0.75, 2},
                                      StoppingRegion::everything(2),
                                      linear_payoff(), cfg);
  CHECK(est.mean == 0.75);
  CHECK(est.std_error == 0.0);
  CHECK(est.censor_rate == 0.0);
}

TEST_CASE("start at the target gives Laplace transform 1 exactly") {
  auto m = bm2(0.5);
  SimConfig cfg;
  cfg.paths = 50;
  auto est = simulate_hitting_laplace(m, {1.0, 1}, {1.0, 1}, cfg);
  CHECK(est.mean == 1.0);
  CHECK(est.std_error == 0.0);
}

TEST_CASE("hitting Laplace matches the closed form within 3 SE") {
  auto m = bm2(0.5);
  SimConfig cfg;
  cfg.step = 0.02;
  cfg.paths = 20000;
  cfg.seed = 31337;
  auto est = simulate_hitting_laplace(m, vertex(), {1.0, 1}, cfg);
  CHECK(std::abs(est.mean - std::exp(-1.0)) < 3.0 * est.std_error);

  // off-leg start on a three-leg spider
  auto m3 = brownian_spider(3, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.5);
  cfg.paths = 10000;
  auto est3 = simulate_hitting_laplace(m3, {1.0, 2}, {1.0, 1}, cfg);
  double exact = hitting_laplace(m3, {1.0, 2}, {1.0, 1});
  CHECK(std::abs(est3.mean - exact) < 3.0 * est3.std_error);
}

TEST_CASE("discounted stop matches the 1-D pasting closed form within 3 SE") {
  auto m = bm2(0.5);
  StoppingRegion region;
  region.n = 2;
  region.legs = {{{1.0, std::numeric_limits<double>::infinity()}}, {}};
  SimConfig cfg;
  cfg.step = 0.02;
  cfg.paths = 20000;
  cfg.seed = 4242;
  auto est = simulate_discounted_stop(m, {0.5, 2}, region, linear_payoff(), cfg);
  double exact = 1.0 * std::exp(-(1.0 + 0.5));  // z e^{-theta(z+x)} across 0
  CHECK(std::abs(est.mean - exact) < 3.0 * est.std_error);
}

TEST_CASE("resolvent of 1 is 1/r within 3 SE") {
  auto m = bm2(2.0);
  LegFunction one;
  one.eval = [](double, int) { return 1.0; };
  SimConfig cfg;
  cfg.step = 0.05;
  cfg.paths = 400;
  cfg.horizon = 10.0;  // e^{-rT} = 2e-9: horizon bias is negligible
  cfg.seed = 5;
  auto est = simulate_resolvent(m, vertex(), one, cfg);
  CHECK(std::abs(est.mean - 0.5) < std::max(3.0 * est.std_error, 1e-3));
}

TEST_CASE("resolvent of phi matches the quadrature oracle within 3 SE") {
  auto m = bm2(0.5);
  LegFunction f;
  f.eval = [m](double x, int) { return m.phi(x); };
  SimConfig cfg;
  cfg.step = 0.05;
  cfg.paths = 800;
  cfg.horizon = 30.0;
  cfg.seed = 6;
  auto est = simulate_resolvent(m, {0.5, 1}, f, cfg);
  double exact = resolvent_apply(m, f, {0.5, 1});
  // allow a small h^2 discretization floor on top of the statistical band
  CHECK(std::abs(est.mean - exact) < 3.0 * est.std_error + 0.01);
}

TEST_CASE("halving the step moves the estimate by less than the noise band") {
  auto m = bm2(0.5);
  SimConfig cfg;
  cfg.paths = 20000;
  cfg.seed = 7;
  cfg.step = 0.04;
  auto coarse = simulate_hitting_laplace(m, vertex(), {1.0, 1}, cfg);
  cfg.step = 0.02;
  auto fine = simulate_hitting_laplace(m, vertex(), {1.0, 1}, cfg);
  CHECK(std::abs(coarse.mean - fine.mean) <
        2.0 * (coarse.std_error + fine.std_error) + 0.01);
}

TEST_CASE("vertex leg choices follow p within 4 sigma") {
  auto m = brownian_spider(3, {0.5, 0.3, 0.2}, 0.5);
  Walker w(m, 0.01, 123, 0);
  const int visits = 200000;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < visits; ++i) {
    w.pos = 0;
    w.advance();
    ++counts[static_cast<size_t>(w.leg) - 1];
  }
  for (int i = 0; i < 3; ++i) {
    double p = m.p[static_cast<size_t>(i)];
    double sigma = std::sqrt(p * (1.0 - p) * visits);
    CHECK(std::abs(counts[static_cast<size_t>(i)] - p * visits) < 4.0 * sigma);
  }
}

TEST_CASE("antithetic pairing halves the sample count deterministically") {
  auto m = bm2(0.5);
  SimConfig cfg;
  cfg.step = 0.05;
  cfg.paths = 4000;
  cfg.seed = 11;
  cfg.antithetic = true;
  auto est = simulate_hitting_laplace(m, vertex(), {1.0, 1}, cfg);
  CHECK(est.paths_used == 2000);
  auto again = simulate_hitting_laplace(m, vertex(), {1.0, 1}, cfg);
  CHECK(est.mean == again.mean);
  CHECK(std::abs(est.mean - std::exp(-1.0)) < 4.0 * est.std_error + 0.01);
}

TEST_CASE("a too-small horizon raises the censoring warning") {
  auto m = bm2(0.5);
  SimConfig cfg;
  cfg.step = 0.05;
  cfg.paths = 500;
  cfg.horizon = 0.05;
  auto est = simulate_hitting_laplace(m, vertex(), {2.0, 1}, cfg);
  CHECK(est.censor_warning);
  CHECK(est.censor_rate == 1.0);
  CHECK(est.mean == 0.0);
}

TEST_CASE("target off the lattice is snapped and flagged") {
  auto m = bm2(0.5);
  SimConfig cfg;
  cfg.step = 0.05;
  cfg.paths = 100;
  auto est = simulate_hitting_laplace(m, vertex(), {0.1234, 1}, cfg);
  CHECK(est.target_snapped);
  auto on = simulate_hitting_laplace(m, vertex(), {0.10, 1}, cfg);
  CHECK(!on.target_snapped);
}

TEST_CASE("config validation") {
  auto m = bm2(0.5);
  SimConfig cfg;
  cfg.step = 0.0;
  CHECK_THROWS_AS(simulate_hitting_laplace(m, vertex(), {1.0, 1}, cfg),
                  std::invalid_argument);
  cfg.step = 0.05;
  cfg.paths = 0;
  CHECK_THROWS_AS(simulate_hitting_laplace(m, vertex(), {1.0, 1}, cfg),
                  std::invalid_argument);
  cfg.paths = 10;
  StoppingRegion empty;
  empty.n = 2;
  empty.legs.resize(2);
  CHECK_THROWS_AS(
      simulate_discounted_stop(m, vertex(), empty, linear_payoff(), cfg),
      std::invalid_argument);
}
