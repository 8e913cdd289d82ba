#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spider/numerics.hpp"

using namespace spider;

TEST_CASE("find_root_bracketed finds cos root") {
  auto res = find_root_bracketed([](double x) { return std::cos(x); }, 1.0, 2.0);
  CHECK(res.root == doctest::Approx(M_PI / 2).epsilon(1e-10));
  CHECK(std::abs(res.residual) < 1e-9);
  CHECK(res.iterations > 0);
}

TEST_CASE("find_root_bracketed handles exact endpoint roots") {
  auto res = find_root_bracketed([](double x) { return x * (x - 1.0); }, 0.0, 0.5);
  CHECK(res.root == 0.0);
  CHECK(res.iterations == 0);
}

TEST_CASE("find_root_bracketed rejects bad brackets") {
  CHECK_THROWS_AS(
      find_root_bracketed([](double x) { return x * x + 1.0; }, -1.0, 1.0),
      std::invalid_argument);
  CHECK_THROWS_AS(find_root_bracketed([](double x) { return x; }, 2.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("find_root_bracketed copes with one very flat endpoint") {
  // nearly flat near 0, steep near the far end: plain false position stalls
  auto f = [](double w) {
    return w * w * std::cosh(w) - 2.0 * w * std::sinh(w) -
           std::exp(-w) * w * (w + 2.0);
  };
  auto res = find_root_bracketed(f, 1e-6, 8.0);
  CHECK(std::abs(f(res.root)) < 1e-8);
  CHECK(res.root > 1.5);
}

TEST_CASE("solve_system converges on a 2x2 nonlinear system") {
  auto F = [](const std::vector<double>& x) {
    return std::vector<double>{x[0] * x[0] + x[1] * x[1] - 4.0, x[0] - x[1]};
  };
  auto x = solve_system(F, {1.0, 1.5});
  CHECK(x[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(x[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("solve_system reports the last iterate on failure") {
  auto F = [](const std::vector<double>& x) {
    return std::vector<double>{x[0] * x[0] + 1.0};  // no real root
  };
  try {
    solve_system(F, {1.0});
    FAIL("expected SolveError");
  } catch (const SolveError& e) {
    CHECK(e.last_iterate.size() == 1);
    CHECK(e.last_residual > 0.0);
  }
}

TEST_CASE("integrate_leg: finite, semi-infinite, oscillatory") {
  CHECK(integrate_leg([](double x) { return x * x; }, 0.0, 1.0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(integrate_leg([](double x) { return std::exp(-x); }, 0.0,
                      std::numeric_limits<double>::infinity()) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(integrate_leg([](double x) { return x * std::exp(-x); }, 0.0,
                      std::numeric_limits<double>::infinity()) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(integrate_leg([](double x) { return std::sin(x); }, 0.0, 2.0 * M_PI) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("integrate_leg error estimate bounds the true error") {
  auto r = integrate_leg_est([](double x) { return std::exp(-x * x); }, 0.0,
                             std::numeric_limits<double>::infinity());
  double exact = std::sqrt(M_PI) / 2.0;
  CHECK(std::abs(r.value - exact) <= 10.0 * r.error_estimate + 1e-14);
}

TEST_CASE("integrate_leg: empty and reversed ranges are zero") {
  CHECK(integrate_leg([](double x) { return x; }, 1.0, 1.0) == 0.0);
  CHECK(integrate_leg([](double x) { return x; }, 2.0, 1.0) == 0.0);
}

TEST_CASE("derivative stencils are second order") {
  auto f = [](double x) { return std::exp(x); };
  double d = std::exp(1.0);
  CHECK(deriv_central(f, 1.0) == doctest::Approx(d).epsilon(1e-9));
  CHECK(deriv_forward(f, 1.0) == doctest::Approx(d).epsilon(1e-8));
  CHECK(deriv_backward(f, 1.0) == doctest::Approx(d).epsilon(1e-8));
}

TEST_CASE("one-sided stencils do not cross a kink at x") {
  auto f = [](double x) { return std::abs(x - 1.0); };
  CHECK(deriv_forward(f, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(deriv_backward(f, 1.0) == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("solve_dense recovers a known solution") {
  std::vector<std::vector<double>> A = {
      {2.0, 1.0, -1.0}, {-3.0, -1.0, 2.0}, {-2.0, 1.0, 2.0}};
  std::vector<double> x_true = {1.0, -2.0, 3.0};
  std::vector<double> b(3, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i] += A[i][j] * x_true[j];
  auto x = solve_dense(A, b);
  for (int i = 0; i < 3; ++i)
    CHECK(x[i] == doctest::Approx(x_true[i]).epsilon(1e-12));
}

TEST_CASE("solve_dense rejects singular matrices") {
  CHECK_THROWS_AS(solve_dense({{1.0, 2.0}, {2.0, 4.0}}, {1.0, 2.0}),
                  std::runtime_error);
}
