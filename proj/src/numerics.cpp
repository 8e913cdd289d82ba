#include "spider/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spider {

RootResult find_root_bracketed(const ScalarFn& f, double lo, double hi,
                               double tol) {
  if (!(lo < hi)) throw std::invalid_argument("find_root_bracketed: lo >= hi");
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0, lo, hi};
  if (fhi == 0.0) return {hi, 0.0, 0, lo, hi};
  if (flo * fhi > 0.0)
    throw std::invalid_argument("find_root_bracketed: no sign change on bracket");

  double a = lo, b = hi, fa = flo, fb = fhi;
  double x = a, fx = fa;
  const int max_iter = 200;
  int it = 0;
  int side = 0;  // Illinois: halve the stale endpoint's value on repeats
  for (; it < max_iter; ++it) {
    // secant candidate, fall back to bisection when it leaves the bracket
    double s = b - fb * (b - a) / (fb - fa);
    if (!(s > a && s < b)) s = 0.5 * (a + b);
    x = s;
    fx = f(x);
    if (std::abs(fx) <= tol || (b - a) <= tol * (1.0 + std::abs(x))) break;
    if (fa * fx <= 0.0) {
      b = x;
      fb = fx;
      if (side == 1) fa *= 0.5;
      side = 1;
    } else {
      a = x;
      fa = fx;
      if (side == -1) fb *= 0.5;
      side = -1;
    }
  }
  if (it == max_iter)
    throw std::runtime_error("find_root_bracketed: max iterations, bracket [" +
                             std::to_string(a) + "," + std::to_string(b) + "]");
  return {x, fx, it + 1, a, b};
}

namespace {

double norm_inf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::vector<double> solve_dense(std::vector<std::vector<double>> A,
                                std::vector<double> b) {
  const size_t n = b.size();
  for (size_t k = 0; k < n; ++k) {
    size_t piv = k;
    for (size_t i = k + 1; i < n; ++i)
      if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
    if (std::abs(A[piv][k]) < 1e-300)
      throw std::runtime_error("solve_dense: singular matrix");
    std::swap(A[k], A[piv]);
    std::swap(b[k], b[piv]);
    for (size_t i = k + 1; i < n; ++i) {
      double m = A[i][k] / A[k][k];
      for (size_t j = k; j < n; ++j) A[i][j] -= m * A[k][j];
      b[i] -= m * b[k];
    }
  }
  std::vector<double> x(n);
  for (size_t i = n; i-- > 0;) {
    double s = b[i];
    for (size_t j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
    x[i] = s / A[i][i];
  }
  return x;
}

std::vector<double> solve_system(const VectorFn& F, std::vector<double> x,
                                 double tol) {
  const size_t n = x.size();
  const int max_iter = 100;
  std::vector<double> fx = F(x);
  if (fx.size() != n) throw std::invalid_argument("solve_system: F dimension mismatch");
  double res = norm_inf(fx);
  for (int it = 0; it < max_iter; ++it) {
    if (res <= tol) return x;
    // forward-difference Jacobian
    std::vector<std::vector<double>> J(n, std::vector<double>(n));
    for (size_t j = 0; j < n; ++j) {
      double h = 1e-7 * (1.0 + std::abs(x[j]));
      std::vector<double> xp = x;
      xp[j] += h;
      std::vector<double> fp = F(xp);
      for (size_t i = 0; i < n; ++i) J[i][j] = (fp[i] - fx[i]) / h;
    }
    std::vector<double> rhs(n);
    for (size_t i = 0; i < n; ++i) rhs[i] = -fx[i];
    std::vector<double> dx = solve_dense(J, rhs);

    // backtracking line search with positivity projection
    double lambda = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      std::vector<double> xn(n);
      for (size_t i = 0; i < n; ++i)
        xn[i] = std::max(x[i] + lambda * dx[i], 1e-12);
      std::vector<double> fn = F(xn);
      double rn = norm_inf(fn);
      if (rn < res) {
        x = std::move(xn);
        fx = std::move(fn);
        res = rn;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted)
      throw SolveError("solve_system: line search stalled, residual " +
                           std::to_string(res),
                       x, res);
  }
  if (res <= tol) return x;
  throw SolveError("solve_system: no convergence after 100 iterations, residual " +
                       std::to_string(res),
                   x, res);
}

namespace {

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1,1].
constexpr double kKronrodNodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,
    0.741531185599394,  0.864864423359769,  0.949107912342759,
    0.991455371120813};
constexpr double kKronrodWeights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
constexpr double kGaussWeights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

struct Panel {
  double value;
  double error;
};

Panel g7k15(const ScalarFn& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fk = 0.0, fg = 0.0;
  for (int i = 0; i < 15; ++i) {
    double v = f(c + h * kKronrodNodes[i]);
    fk += kKronrodWeights[i] * v;
    if (i % 2 == 1) fg += kGaussWeights[i / 2] * v;
  }
  // |K15 - G7| is a conservative panel error estimate
  return {fk * h, std::abs((fk - fg) * h)};
}

void adapt(const ScalarFn& f, double a, double b, double tol, int depth,
           double& sum, double& errsum) {
  Panel p = g7k15(f, a, b);
  if (p.error <= tol || depth >= 48) {
    if (depth >= 48 && p.error > tol * 100)
      throw std::runtime_error("integrate_leg: no convergence, partial sum " +
                               std::to_string(sum + p.value));
    sum += p.value;
    errsum += p.error;
    return;
  }
  double m = 0.5 * (a + b);
  adapt(f, a, m, tol * 0.6, depth + 1, sum, errsum);
  adapt(f, m, b, tol * 0.6, depth + 1, sum, errsum);
}

}  // namespace

QuadResult integrate_leg_est(const ScalarFn& f, double a, double b, double tol) {
  double sum = 0.0, errsum = 0.0;
  if (std::isinf(b)) {
    // x = a + u/(1-u), dx = du/(1-u)^2
    auto g = [&](double u) {
      double om = 1.0 - u;
      double x = a + u / om;
      return f(x) / (om * om);
    };
    adapt(g, 0.0, 1.0 - 1e-14, tol, 0, sum, errsum);
  } else {
    if (b <= a) return {0.0, 0.0};
    adapt(f, a, b, tol, 0, sum, errsum);
  }
  return {sum, errsum};
}

double integrate_leg(const ScalarFn& f, double a, double b, double tol) {
  return integrate_leg_est(f, a, b, tol).value;
}

double deriv_central(const ScalarFn& f, double x, double step) {
  double h = step * (1.0 + std::abs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double deriv_forward(const ScalarFn& f, double x, double step) {
  double h = step * (1.0 + std::abs(x));
  return (-1.5 * f(x) + 2.0 * f(x + h) - 0.5 * f(x + 2.0 * h)) / h;
}

double deriv_backward(const ScalarFn& f, double x, double step) {
  double h = step * (1.0 + std::abs(x));
  return (1.5 * f(x) - 2.0 * f(x - h) + 0.5 * f(x - 2.0 * h)) / h;
}

}  // namespace spider
