#pragma once

#include "spider/diffusion.hpp"
#include "spider/kernels.hpp"

namespace spider {

/// A measurable function on the star graph, given per leg. Analytic one-sided
/// scale-derivatives and the generator (d/dm)(d/dS) are optional; finite
/// differences fill in when they are absent. Payoffs with kinks should either
/// supply analytic one-sided derivatives or register the kink locations so
/// the one-sided stencils do not straddle them.
struct LegFunction {
  std::function<double(double, int)> eval;
  std::function<double(double, int)> d_plus;    // d/dS from the right
  std::function<double(double, int)> d_minus;   // d/dS from the left
  std::function<double(double, int)> generator; // (d/dm)(d/dS)
  std::vector<double> kinks;  // x-locations where one-sided values differ
  double fd_step = 1e-6;

  double operator()(double x, int leg) const { return eval(x, leg); }
};

// One-sided scale derivatives and the generator, analytic when supplied.
double leg_dplus(const SpiderModel& model, const LegFunction& f, double x, int leg);
double leg_dminus(const SpiderModel& model, const LegFunction& f, double x, int leg);
double leg_generator(const SpiderModel& model, const LegFunction& f, double x, int leg);

/// The representing probability measure of a normalized excessive function:
/// atom at the vertex, per-leg tails sigma((x,inf), i), per-leg atom detector.
struct RepresentingMeasure {
  double vertex_atom = 0.0;
  std::function<double(double, int)> tail;
  std::function<double(double, int)> atom_at;
};

/// Df(0) = sum_i p_i f+(0,i); <= 0 for excessive f.
double gluing_value(const SpiderModel& model, const LegFunction& f);

/// Representing measure of an excessive f with f(vertex) = 1.
RepresentingMeasure representing_measure_at_vertex(const SpiderModel& model,
                                                   const LegFunction& f);

/// Partial representing-measure formulas for f normalized at an off-vertex
/// base point (x0, i0): the upper tail above x0 and, below x0, only the
/// aggregate of the vertex atom, the cross-leg masses and sigma((0,x), i0).
struct OffVertexMeasure {
  SpiderPoint base;
  std::function<double(double)> upper_tail;       // x >= x0, leg i0
  std::function<double(double)> lower_aggregate;  // 0 <= x <= x0
};

OffVertexMeasure representing_measure_offvertex(const SpiderModel& model,
                                                const LegFunction& f,
                                                SpiderPoint base);

struct ExcessivityReport {
  bool excessive = false;
  double gluing = 0.0;
  double min_tail_value = 0.0;           // min over grid of f+ phi - phi+ f
  double max_monotonicity_violation = 0.0;
  double max_tail_value = 0.0;
  std::vector<std::string> notes;
};

struct ExcessivityTolerances {
  double sign = 1e-8;
  double monotonicity = 1e-6;
};

/// Numeric check of the excessivity characterization: gluing condition at the
/// vertex plus per-leg positivity/monotonicity of f+ phi - phi+ f on a grid.
ExcessivityReport is_excessive(const SpiderModel& model, const LegFunction& f,
                               const std::vector<double>& grid,
                               ExcessivityTolerances tol = {});

struct RewardDecomposition {
  double delta0 = 0.0;
  LegFunction f_density;  // r g - (d/dm)(d/dS) g
};

RewardDecomposition reward_decomposition(const SpiderModel& model,
                                         const LegFunction& g);

/// Integral form used to validate the decomposition:
/// int_(x,inf) phi f dm = g+ phi - g phi+.
double reward_tail_integral(const SpiderModel& model, const LegFunction& g,
                            double x, int leg);

struct BoundReport {
  bool bounded = false;
  double sup_ratio = 0.0;
};

/// Heuristic finiteness test: g/H with H the harmonic function of
/// coefficients a; bounded verdict requires the ratio to decrease over the
/// last quarter of the grid.
BoundReport finiteness_check(const SpiderModel& model, const LegFunction& g,
                             const std::vector<double>& a,
                             const std::vector<double>& grid);

}  // namespace spider
