#pragma once

#include "spider/excessive.hpp"

namespace spider {

struct LegInterval {
  double lo = 0.0;
  double hi = 0.0;  // may be +inf
};

/// Closed stopping region: per-leg disjoint sorted intervals; the vertex is
/// tracked separately so intervals touching 0 on any leg stay consistent with
/// the vertex identification.
struct StoppingRegion {
  int n = 0;
  std::vector<std::vector<LegInterval>> legs;  // legs[i-1], sorted by lo
  bool vertex_included = false;

  bool empty() const;
  bool contains(double x, int leg) const;
  bool contains(SpiderPoint p) const { return contains(p.x, p.leg); }
  void normalize();  // sort, merge, sync vertex flag with intervals at 0

  /// Region {x >= z_i on every leg}, vertex excluded (all z_i > 0).
  static StoppingRegion upper_rays(const std::vector<double>& z);
  static StoppingRegion everything(int n);
};

struct SolutionDiagnostics {
  double gluing_value = 0.0;
  std::vector<double> smooth_fit_residuals;
  double majorant_min_gap = 0.0;
  std::vector<double> boundary_residuals;  // Eq-(b0)-type residuals
  bool paper_validated = true;  // false for parameter ranges with no published numbers
};

struct StoppingSolution {
  StoppingRegion region;
  LegFunction value;
  SolutionDiagnostics diagnostics;
  std::vector<double> thresholds;  // per-leg, when the region is upper rays
  char dispatch_case = 0;          // 'a'/'b'/'c' for the connected-region family
};

enum class Restrict { all, region, complement };

/// G_r applied to f restricted to a region: sums per-leg integrals of the
/// Green kernel against f with the speed measure, splitting each integral at
/// the evaluation point and at region boundaries.
double resolvent_apply(const SpiderModel& model, const LegFunction& f,
                       SpiderPoint at, const StoppingRegion* region = nullptr,
                       Restrict restrict = Restrict::all, double tol = 1e-9);

/// Sufficient condition for the vertex to lie in the continuation region:
/// Dg(0) > 0. A false return means "no conclusion".
bool vertex_in_continuation(const SpiderModel& model, const LegFunction& g);

/// The three-leg payoff g(x,1)=1+x, g(x,2)=(1-x/2)+, g(x,3)=(1-2x)+ with
/// analytic one-sided derivatives and registered kinks.
LegFunction connected_example_payoff();

/// Solver for the connected-region stopping problem with the payoff above on
/// a Brownian spider with n=3, p=(1/3,1/3,1/3). Dispatches on r:
/// (a) r>2, (b) 1/8<r<=2, (c) r<=1/8.
StoppingSolution solve_spider_example71(const SpiderModel& model);

enum class PayoffFamily { linear, quadratic };

LegFunction threshold_family_payoff(PayoffFamily family,
                                    const std::vector<double>& A);

/// Per-leg threshold solver for the payoff families g = A_i x (linear) and
/// g = A_i x^2 (quadratic) on a Brownian spider. Builds the boundary integral
/// equations in closed form, solves them with damped Newton, assembles the
/// value via the restricted resolvent plus vertex term, and records
/// verification diagnostics.
StoppingSolution solve_threshold_system(const SpiderModel& model,
                                        PayoffFamily family,
                                        const std::vector<double>& A);

/// Residual of the closed-form boundary equation system (used by the solver
/// and, independently, by uniqueness sweeps).
std::vector<double> threshold_equations(const SpiderModel& model,
                                        PayoffFamily family,
                                        const std::vector<double>& A,
                                        const std::vector<double>& z);

/// Value of the first-entry rule for an arbitrary closed region: payoff on
/// the region, harmonic hitting-time interpolation on continuation
/// components (phi-ratio, psi-tilde ratio, or the two-sided decomposition).
LegFunction assemble_value(const SpiderModel& model,
                           const StoppingRegion& region,
                           const LegFunction& payoff);

struct VerificationCheck {
  std::string name;
  bool passed = false;
  double worst = 0.0;
};

struct VerificationReport {
  std::vector<VerificationCheck> checks;
  bool all_passed() const;
};

/// The six-check battery: majorant, excessivity, boundary-equation residual,
/// sign of the density on the region, vertex condition, smooth fit.
VerificationReport verify_solution(const SpiderModel& model,
                                   const LegFunction& payoff,
                                   const StoppingSolution& sol,
                                   const std::vector<double>& grid,
                                   double tol = 1e-4);

/// |dV/dS - dg/dS| at a non-vertex boundary point, derivative taken on the
/// continuation side.
double smooth_fit_check(const SpiderModel& model, const StoppingSolution& sol,
                        const LegFunction& payoff, SpiderPoint boundary);

}  // namespace spider
