#pragma once

#include "spider/diffusion.hpp"

namespace spider {

enum class KernelBranch {
  same_leg_x_below,
  same_leg_x_above,
  cross_leg,
  vertex_involved
};

struct GreenKernelValue {
  double value = 0.0;
  KernelBranch branch = KernelBranch::vertex_involved;
};

/// Pole of a minimal excessive function: a finite point of the graph or a
/// leg's point at infinity.
struct Pole {
  SpiderPoint point;
  bool at_infinity = false;

  static Pole at(SpiderPoint p) { return {p, false}; }
  static Pole infinity_on_leg(int leg) { return {{0.0, leg}, true}; }
};

/// (1/p_i) psi(x) + (1/c_r) phi(x): the leg-dependent increasing solution in
/// the same-leg branch of the Green kernel.
double psi_tilde(const SpiderModel& model, double x, int leg);
double psi_tilde_dS(const SpiderModel& model, double x, int leg);

/// Resolvent density of the spider with respect to its speed measure.
GreenKernelValue green_kernel(const SpiderModel& model, SpiderPoint from,
                              SpiderPoint to);

/// Transition density of the Brownian spider, taken with respect to length on
/// the target leg.
double transition_density_brownian(const SpiderModel& model, double t,
                                   SpiderPoint from, SpiderPoint to);

/// Increasing fundamental solution of the skew reduction: psi_tilde on the
/// principal leg for x >= 0, (1/c_r) phi(-x) on the other side.
double skew_psi(const SpiderModel& model, double x, int principal_leg);

/// E[e^{-r H_target}] for the spider started at `from`.
double hitting_laplace(const SpiderModel& model, SpiderPoint from,
                       SpiderPoint target);

/// Minimal r-excessive function normalized to 1 at the vertex.
double minimal_excessive(const SpiderModel& model, SpiderPoint at, Pole pole);

/// Positive r-harmonic function with coefficients a on the leg infinities:
/// (a_i c_r / p_i) psi(x) + phi(x) sum(a).
double harmonic_function(const SpiderModel& model,
                         const std::vector<double>& a, SpiderPoint at);

}  // namespace spider
