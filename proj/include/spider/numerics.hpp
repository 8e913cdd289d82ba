#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spider {

using ScalarFn = std::function<double(double)>;
using VectorFn = std::function<std::vector<double>(const std::vector<double>&)>;

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

/// Thrown by solve_system when Newton iteration fails to converge; carries the
/// last iterate so callers can inspect how far it got.
struct SolveError : std::runtime_error {
  std::vector<double> last_iterate;
  double last_residual;
  SolveError(const std::string& msg, std::vector<double> it, double res)
      : std::runtime_error(msg), last_iterate(std::move(it)), last_residual(res) {}
};

/// Bisection-safeguarded secant root finder. Requires f(lo)*f(hi) <= 0.
/// The returned root never leaves the initial bracket.
RootResult find_root_bracketed(const ScalarFn& f, double lo, double hi,
                               double tol = 1e-10);

/// Damped Newton for small dense systems: numeric forward-difference Jacobian,
/// backtracking line search on ||F||_inf, iterates projected to stay positive.
std::vector<double> solve_system(const VectorFn& F, std::vector<double> x0,
                                 double tol = 1e-10);

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Adaptive Gauss-Kronrod (G7/K15) quadrature on [a,b]. Pass b = infinity for
/// a semi-infinite leg; the tail is mapped to [0,1) by x = a + u/(1-u), which
/// assumes the integrand decays at least exponentially.
QuadResult integrate_leg_est(const ScalarFn& f, double a, double b,
                             double tol = 1e-9);
double integrate_leg(const ScalarFn& f, double a, double b, double tol = 1e-9);

// Finite differences (step relative to |x|+1 unless given absolutely).
double deriv_central(const ScalarFn& f, double x, double step = 1e-6);
// Second-order one-sided stencils; used where a kink may sit at x.
double deriv_forward(const ScalarFn& f, double x, double step = 1e-6);
double deriv_backward(const ScalarFn& f, double x, double step = 1e-6);

/// Gaussian elimination with partial pivoting for the small systems that
/// appear here (vertex harmonic matching, Newton steps; n <= 10).
std::vector<double> solve_dense(std::vector<std::vector<double>> A,
                                std::vector<double> b);

}  // namespace spider
