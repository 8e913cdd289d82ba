#include "spider/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace spider {

namespace {

void check_leg(const SpiderModel& model, int leg) {
  if (leg < 1 || leg > model.n)
    throw std::invalid_argument("leg index out of range");
}

// phi(x)*phi(y) with a log-space fallback once the exponents are extreme
// (the cross-leg kernel decays like e^{-theta(x+y)}).
double phi_product(const SpiderModel& model, double x, double y) {
  if (model.chars.log_phi) {
    double lx = model.chars.log_phi(x, model.r);
    double ly = model.chars.log_phi(y, model.r);
    if (std::abs(lx) > 500.0 || std::abs(ly) > 500.0) return std::exp(lx + ly);
  }
  return model.phi(x) * model.phi(y);
}

}  // namespace

double psi_tilde(const SpiderModel& model, double x, int leg) {
  check_leg(model, leg);
  return model.psi(x) / model.prob(leg) + model.phi(x) / model.c;
}

double psi_tilde_dS(const SpiderModel& model, double x, int leg) {
  check_leg(model, leg);
  return model.psi_dS(x) / model.prob(leg) + model.phi_dS(x) / model.c;
}

GreenKernelValue green_kernel(const SpiderModel& model, SpiderPoint from,
                              SpiderPoint to) {
  check_leg(model, from.leg);
  check_leg(model, to.leg);
  if (from.is_vertex() || to.is_vertex()) {
    // psi_tilde(0) = 1/c_r, so both same-leg branches and the cross branch
    // agree at the vertex.
    double other = from.is_vertex() ? to.x : from.x;
    return {model.phi(other) / model.c, KernelBranch::vertex_involved};
  }
  if (from.leg != to.leg)
    return {phi_product(model, from.x, to.x) / model.c, KernelBranch::cross_leg};
  if (from.x <= to.x)
    return {model.phi(to.x) * psi_tilde(model, from.x, from.leg),
            KernelBranch::same_leg_x_below};
  return {model.phi(from.x) * psi_tilde(model, to.x, to.leg),
          KernelBranch::same_leg_x_above};
}

double transition_density_brownian(const SpiderModel& model, double t,
                                   SpiderPoint from, SpiderPoint to) {
  if (!(t > 0.0)) throw std::invalid_argument("transition density: t <= 0");
  check_leg(model, from.leg);
  check_leg(model, to.leg);
  const double x = from.x, y = to.x;
  const double norm = 1.0 / std::sqrt(2.0 * M_PI * t);
  const double image = std::exp(-(x + y) * (x + y) / (2.0 * t));
  const bool same_leg = (from.leg == to.leg) && !from.is_vertex();
  const double pj = model.prob(to.leg);
  if (!same_leg) return 2.0 * pj * norm * image;
  double reflected = std::exp(-(x - y) * (x - y) / (2.0 * t));
  return norm * (reflected - image) + 2.0 * pj * norm * image;
}

double skew_psi(const SpiderModel& model, double x, int principal_leg) {
  check_leg(model, principal_leg);
  if (x >= 0.0) return psi_tilde(model, x, principal_leg);
  return model.phi(-x) / model.c;
}

double hitting_laplace(const SpiderModel& model, SpiderPoint from,
                       SpiderPoint target) {
  check_leg(model, from.leg);
  check_leg(model, target.leg);
  if (from == target) return 1.0;
  if (target.is_vertex()) return model.phi(from.x);
  const int k = target.leg;  // principal leg of the skew reduction
  const double y = target.x;
  if (from.is_vertex() || from.leg != k) {
    // start encoded on the negative side of the skew line:
    // phi(x) * skew_psi(0) / skew_psi(y)
    return skew_psi(model, -from.x, k) / psi_tilde(model, y, k);
  }
  if (from.x <= y) return psi_tilde(model, from.x, k) / psi_tilde(model, y, k);
  return model.phi(from.x) / model.phi(y);
}

double minimal_excessive(const SpiderModel& model, SpiderPoint at, Pole pole) {
  check_leg(model, at.leg);
  check_leg(model, pole.point.leg);
  if (pole.at_infinity) {
    if (!at.is_vertex() && at.leg == pole.point.leg)
      return model.c * psi_tilde(model, at.x, at.leg);
    return model.phi(at.x);
  }
  double num = green_kernel(model, at, pole.point).value;
  double den = green_kernel(model, vertex(), pole.point).value;
  return num / den;
}

double harmonic_function(const SpiderModel& model,
                         const std::vector<double>& a, SpiderPoint at) {
  check_leg(model, at.leg);
  if (a.size() != static_cast<size_t>(model.n))
    throw std::invalid_argument("harmonic_function: coefficient length");
  double sum = 0.0;
  bool all_zero = true;
  for (double ak : a) {
    if (ak < 0.0)
      throw std::invalid_argument("harmonic_function: negative coefficient");
    if (ak != 0.0) all_zero = false;
    sum += ak;
  }
  if (all_zero)
    throw std::invalid_argument("harmonic_function: all coefficients zero");
  double ai = a[static_cast<size_t>(at.leg) - 1];
  return ai * model.c / model.prob(at.leg) * model.psi(at.x) +
         model.phi(at.x) * sum;
}

}  // namespace spider
