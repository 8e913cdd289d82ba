#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "spider/kernels.hpp"
#include "spider/numerics.hpp"

using namespace spider;

namespace {
SpiderModel uniform3(double r) {
  return brownian_spider(3, {1.0 / 3, 1.0 / 3, 1.0 / 3}, r);
}
}  // namespace

TEST_CASE("green kernel at the vertex equals 1/theta") {
  for (double r : {0.5, 2.0, 8.0}) {
    auto m = uniform3(r);
    CHECK(green_kernel(m, vertex(), vertex()).value ==
          doctest::Approx(1.0 / std::sqrt(2.0 * r)).epsilon(1e-13));
  }
}

TEST_CASE("green kernel is symmetric on random point pairs") {
  auto m = brownian_spider(3, {0.5, 0.3, 0.2}, 1.3);
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> ux(0.0, 5.0);
  std::uniform_int_distribution<int> ul(1, 3);
  for (int k = 0; k < 50; ++k) {
    SpiderPoint a{ux(rng), ul(rng)}, b{ux(rng), ul(rng)};
    double g1 = green_kernel(m, a, b).value;
    double g2 = green_kernel(m, b, a).value;
    CHECK(std::abs(g1 - g2) < 1e-12 * (1.0 + std::abs(g1)));
  }
}

TEST_CASE("green kernel branches and continuity at the pole and vertex") {
  auto m = uniform3(0.5);
  CHECK(green_kernel(m, {0.5, 1}, {1.0, 1}).branch ==
        KernelBranch::same_leg_x_below);
  CHECK(green_kernel(m, {1.5, 1}, {1.0, 1}).branch ==
        KernelBranch::same_leg_x_above);
  CHECK(green_kernel(m, {0.5, 2}, {1.0, 1}).branch == KernelBranch::cross_leg);
  CHECK(green_kernel(m, vertex(), {1.0, 1}).branch ==
        KernelBranch::vertex_involved);
  // continuity across the diagonal and into the vertex
  double below = green_kernel(m, {1.0 - 1e-9, 1}, {1.0, 1}).value;
  double above = green_kernel(m, {1.0 + 1e-9, 1}, {1.0, 1}).value;
  CHECK(below == doctest::Approx(above).epsilon(1e-7));
  double near_vertex = green_kernel(m, {1e-10, 2}, {1.0, 1}).value;
  CHECK(near_vertex ==
        doctest::Approx(green_kernel(m, vertex(), {1.0, 1}).value).epsilon(1e-8));
}

TEST_CASE("two legs with p=(1/2,1/2) reduce to standard Brownian motion") {
  for (double r : {0.5, 2.0}) {
    auto m = brownian_spider(2, {0.5, 0.5}, r);
    double th = std::sqrt(2.0 * r);
    for (int i = 1; i <= 20; ++i) {
      double x = 0.2 * i, y = 0.13 * i;
      // same leg: distance |x-y|; across the vertex: distance x+y
      CHECK(std::abs(green_kernel(m, {x, 1}, {y, 1}).value -
                     std::exp(-th * std::abs(x - y)) / th) < 1e-10);
      CHECK(std::abs(green_kernel(m, {x, 1}, {y, 2}).value -
                     std::exp(-th * (x + y)) / th) < 1e-10);
      CHECK(std::abs(hitting_laplace(m, {x, 1}, {y, 2}) -
                     std::exp(-th * (x + y))) < 1e-10);
    }
  }
}

TEST_CASE("log-space fallback keeps far cross-leg values finite and positive") {
  auto m = brownian_spider(2, {0.5, 0.5}, 8.0);
  // log phi = -600 at x=150: past the |exponent| > 500 switch
  double v = green_kernel(m, {150.0, 1}, {12.5, 2}).value;
  CHECK(v > 0.0);
  CHECK(v == doctest::Approx(std::exp(-650.0) / 4.0).epsilon(1e-9));
}

TEST_CASE("psi_tilde is 1/c at the vertex, increasing, kernel-consistent") {
  auto m = brownian_spider(3, {0.2, 0.3, 0.5}, 1.0);
  for (int leg = 1; leg <= 3; ++leg) {
    CHECK(psi_tilde(m, 0.0, leg) == doctest::Approx(1.0 / m.c).epsilon(1e-13));
    double prev = psi_tilde(m, 0.0, leg);
    for (double x = 0.3; x < 3.0; x += 0.3) {
      double cur = psi_tilde(m, x, leg);
      CHECK(cur > prev);
      prev = cur;
    }
    CHECK(psi_tilde_dS(m, 1.0, leg) ==
          doctest::Approx(m.psi_dS(1.0) / m.prob(leg) + m.phi_dS(1.0) / m.c));
  }
}

TEST_CASE("transition density integrates to 1 over the graph") {
  auto m = brownian_spider(3, {0.5, 0.25, 0.25}, 0.5);
  for (double t : {0.2, 1.0}) {
    SpiderPoint x{0.7, 1};
    double total = 0.0;
    for (int leg = 1; leg <= 3; ++leg)
      total += integrate_leg(
          [&](double y) {
            return transition_density_brownian(m, t, x, {y, leg});
          },
          0.0, std::numeric_limits<double>::infinity());
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("time-Laplace of the transition density matches the green kernel") {
  auto m = brownian_spider(3, {0.5, 0.25, 0.25}, 0.5);
  SpiderPoint x{0.7, 1};
  for (SpiderPoint y : {SpiderPoint{0.4, 1}, SpiderPoint{1.2, 1},
                        SpiderPoint{0.9, 3}}) {
    double lap = integrate_leg(
        [&](double t) {
          return std::exp(-m.r * t) * transition_density_brownian(m, t, x, y);
        },
        0.0, std::numeric_limits<double>::infinity(), 1e-10);
    // density w.r.t. length = kernel times the target leg's m-density 2 p_j
    double expected = green_kernel(m, x, y).value * 2.0 * m.prob(y.leg);
    CHECK(lap == doctest::Approx(expected).epsilon(1e-7));
  }
}

TEST_CASE("transition density rejects t <= 0") {
  auto m = uniform3(0.5);
  CHECK_THROWS_AS(transition_density_brownian(m, 0.0, {0.5, 1}, {0.5, 1}),
                  std::invalid_argument);
}

TEST_CASE("skew_psi satisfies the flux condition at the fold point") {
  auto m = brownian_spider(3, {0.6, 0.25, 0.15}, 1.0);
  for (int k = 1; k <= 3; ++k) {
    double pk = m.prob(k);
    double right = deriv_forward([&](double x) { return skew_psi(m, x, k); }, 0.0);
    double left = deriv_backward([&](double x) { return skew_psi(m, x, k); }, 0.0);
    CHECK((1.0 - pk) * left == doctest::Approx(pk * right).epsilon(1e-6));
  }
}

TEST_CASE("hitting Laplace special values and bounds") {
  auto m = brownian_spider(3, {0.2, 0.3, 0.5}, 0.5);
  CHECK(hitting_laplace(m, {1.0, 2}, {1.0, 2}) == 1.0);
  CHECK(hitting_laplace(m, vertex(), vertex()) == 1.0);
  CHECK(hitting_laplace(m, {1.3, 2}, vertex()) ==
        doctest::Approx(m.phi(1.3)).epsilon(1e-13));
  for (double x : {0.2, 0.9, 2.4})
    for (int leg = 1; leg <= 3; ++leg) {
      double v = hitting_laplace(m, {x, leg}, {1.0, 1});
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
    }
}

TEST_CASE("hitting Laplace is multiplicative through the vertex") {
  auto m = brownian_spider(3, {0.2, 0.3, 0.5}, 0.8);
  SpiderPoint from{1.7, 2}, target{0.9, 1};
  double direct = hitting_laplace(m, from, target);
  double via = hitting_laplace(m, from, vertex()) *
               hitting_laplace(m, vertex(), target);
  CHECK(direct == doctest::Approx(via).epsilon(1e-12));
}

TEST_CASE("hitting Laplace from above the target is a phi ratio") {
  auto m = uniform3(0.5);
  CHECK(hitting_laplace(m, {2.0, 1}, {1.0, 1}) ==
        doctest::Approx(m.phi(2.0) / m.phi(1.0)).epsilon(1e-13));
}

TEST_CASE("minimal excessive functions are normalized at the vertex") {
  auto m = brownian_spider(3, {0.2, 0.3, 0.5}, 1.0);
  for (Pole pole : {Pole::at({1.2, 2}), Pole::at(vertex()),
                    Pole::infinity_on_leg(3)}) {
    CHECK(minimal_excessive(m, vertex(), pole) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  // vertex pole gives phi; infinity pole gives c psi_tilde on its own leg
  CHECK(minimal_excessive(m, {0.8, 1}, Pole::at(vertex())) ==
        doctest::Approx(m.phi(0.8)).epsilon(1e-12));
  CHECK(minimal_excessive(m, {0.8, 3}, Pole::infinity_on_leg(3)) ==
        doctest::Approx(m.c * psi_tilde(m, 0.8, 3)).epsilon(1e-12));
  CHECK(minimal_excessive(m, {0.8, 1}, Pole::infinity_on_leg(3)) ==
        doctest::Approx(m.phi(0.8)).epsilon(1e-12));
}

TEST_CASE("harmonic function: gluing flux balances at the vertex") {
  auto m = brownian_spider(3, {0.2, 0.3, 0.5}, 1.0);
  std::vector<double> a = {0.4, 0.1, 0.5};
  double flux = 0.0;
  for (int i = 1; i <= 3; ++i)
    flux += m.prob(i) * deriv_forward(
                            [&](double x) {
                              return harmonic_function(m, a, {x, i});
                            },
                            0.0);
  CHECK(std::abs(flux) < 1e-5);
}

TEST_CASE("harmonic function input validation") {
  auto m = uniform3(1.0);
  CHECK_THROWS_AS(harmonic_function(m, {1.0, 2.0}, {0.5, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(harmonic_function(m, {1.0, -1.0, 1.0}, {0.5, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(harmonic_function(m, {0.0, 0.0, 0.0}, {0.5, 1}),
                  std::invalid_argument);
}
