#include "spider/excessive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spider/numerics.hpp"

namespace spider {

namespace {

// Cap the one-sided step so the stencil never straddles a registered kink.
double safe_step(const LegFunction& f, double x, double base, bool forward) {
  double h = base * (1.0 + std::abs(x));
  for (double k : f.kinks) {
    double d = forward ? k - x : x - k;
    if (d > 1e-14 && d < 2.5 * h) h = d / 4.0;
  }
  return h;
}

double scale_slope(const SpiderModel& model, double x, double h) {
  // dS/dx over the stencil footprint
  double lo = std::max(x - h, 0.0);
  return (model.chars.scale(x + h) - model.chars.scale(lo)) / (x + h - lo);
}

}  // namespace

double leg_dplus(const SpiderModel& model, const LegFunction& f, double x,
                 int leg) {
  if (f.d_plus) return f.d_plus(x, leg);
  double h = safe_step(f, x, f.fd_step, true);
  double d = (-1.5 * f.eval(x, leg) + 2.0 * f.eval(x + h, leg) -
              0.5 * f.eval(x + 2.0 * h, leg)) /
             h;
  return d / scale_slope(model, x, h);
}

double leg_dminus(const SpiderModel& model, const LegFunction& f, double x,
                  int leg) {
  if (f.d_minus) return f.d_minus(x, leg);
  if (!(x > 0.0))
    throw std::invalid_argument("leg_dminus: left derivative needs x > 0");
  double h = safe_step(f, x, f.fd_step, false);
  double d = (1.5 * f.eval(x, leg) - 2.0 * f.eval(x - h, leg) +
              0.5 * f.eval(x - 2.0 * h, leg)) /
             h;
  return d / scale_slope(model, x, h);
}

double leg_generator(const SpiderModel& model, const LegFunction& f, double x,
                     int leg) {
  if (f.generator) return f.generator(x, leg);
  // (1/m') d/dx [ (1/S') df/dx ], nested central differences
  double h = 1e-4 * (1.0 + std::abs(x));
  auto u = [&](double y) {
    double hh = 1e-4 * (1.0 + std::abs(y));
    double df = (f.eval(y + hh, leg) - f.eval(y - hh, leg)) / (2.0 * hh);
    double dS =
        (model.chars.scale(y + hh) - model.chars.scale(y - hh)) / (2.0 * hh);
    return df / dS;
  };
  double du = (u(x + h) - u(x - h)) / (2.0 * h);
  return du / model.chars.speed_density(x);
}

double gluing_value(const SpiderModel& model, const LegFunction& f) {
  double s = 0.0;
  for (int i = 1; i <= model.n; ++i)
    s += model.prob(i) * leg_dplus(model, f, 0.0, i);
  return s;
}

RepresentingMeasure representing_measure_at_vertex(const SpiderModel& model,
                                                   const LegFunction& f) {
  if (std::abs(f.eval(0.0, 1) - 1.0) > 1e-9)
    throw std::invalid_argument(
        "representing_measure_at_vertex: f(vertex) must be 1 (normalize first)");
  RepresentingMeasure m;
  m.vertex_atom = -gluing_value(model, f) / model.c;
  m.tail = [model, f](double x, int leg) {
    double fp = leg_dplus(model, f, x, leg);
    return model.prob(leg) / model.c *
           (fp * model.phi(x) - model.phi_dS(x) * f.eval(x, leg));
  };
  m.atom_at = [model, f](double x, int leg) {
    if (!(x > 0.0)) throw std::invalid_argument("atom_at: x must be > 0");
    double fm = leg_dminus(model, f, x, leg);
    double fp = leg_dplus(model, f, x, leg);
    // jump of the tail across x: (p_i/c) phi(x) (f- - f+)
    return model.prob(leg) * model.phi(x) / model.c * (fm - fp);
  };
  return m;
}

OffVertexMeasure representing_measure_offvertex(const SpiderModel& model,
                                                const LegFunction& f,
                                                SpiderPoint base) {
  if (base.is_vertex())
    throw std::invalid_argument(
        "representing_measure_offvertex: base at vertex, use the vertex form");
  if (std::abs(f.eval(base.x, base.leg) - 1.0) > 1e-9)
    throw std::invalid_argument(
        "representing_measure_offvertex: f(base) must be 1");
  OffVertexMeasure om;
  om.base = base;
  const int i0 = base.leg;
  const double x0 = base.x;
  om.upper_tail = [model, f, i0, x0](double x) {
    if (x < x0)
      throw std::invalid_argument("upper_tail: x below the base point");
    double fp = leg_dplus(model, f, x, i0);
    return model.prob(i0) * psi_tilde(model, x0, i0) *
           (fp * model.phi(x) - model.phi_dS(x) * f.eval(x, i0));
  };
  om.lower_aggregate = [model, f, i0, x0](double x) {
    if (x > x0)
      throw std::invalid_argument("lower_aggregate: x above the base point");
    double fm = x > 0.0 ? leg_dminus(model, f, x, i0)
                        : leg_dplus(model, f, 0.0, i0);
    return model.prob(i0) * model.phi(x0) *
           (f.eval(x, i0) * psi_tilde_dS(model, x, i0) -
            fm * psi_tilde(model, x, i0));
  };
  return om;
}

ExcessivityReport is_excessive(const SpiderModel& model, const LegFunction& f,
                               const std::vector<double>& grid,
                               ExcessivityTolerances tol) {
  if (grid.size() < 3)
    throw std::invalid_argument("is_excessive: grid needs >= 3 points per leg");
  ExcessivityReport rep;
  rep.gluing = gluing_value(model, f);
  rep.min_tail_value = std::numeric_limits<double>::infinity();
  rep.max_tail_value = -std::numeric_limits<double>::infinity();
  bool ok = rep.gluing <= tol.sign;
  if (!ok) rep.notes.push_back("gluing condition violated at the vertex");
  for (int leg = 1; leg <= model.n; ++leg) {
    double prev = std::numeric_limits<double>::infinity();
    for (double x : grid) {
      double t = leg_dplus(model, f, x, leg) * model.phi(x) -
                 model.phi_dS(x) * f.eval(x, leg);
      if (!std::isfinite(t)) {
        ok = false;
        rep.notes.push_back("non-finite tail value on leg " + std::to_string(leg));
        continue;
      }
      rep.min_tail_value = std::min(rep.min_tail_value, t);
      rep.max_tail_value = std::max(rep.max_tail_value, t);
      if (t < -tol.sign) {
        ok = false;
        rep.notes.push_back("negative tail on leg " + std::to_string(leg) +
                            " at x=" + std::to_string(x));
      }
      if (t - prev > tol.monotonicity) {
        ok = false;
        rep.notes.push_back("tail increases on leg " + std::to_string(leg) +
                            " at x=" + std::to_string(x));
      }
      prev = t;
    }
  }
  rep.excessive = ok;
  return rep;
}

RewardDecomposition reward_decomposition(const SpiderModel& model,
                                         const LegFunction& g) {
  RewardDecomposition rd;
  rd.delta0 = -gluing_value(model, g);
  LegFunction f;
  f.kinks = g.kinks;
  f.eval = [model, g](double x, int leg) {
    double gen = leg_generator(model, g, x, leg);
    return model.r * g.eval(x, leg) - gen;  // NaN marks a bad point
  };
  rd.f_density = std::move(f);
  return rd;
}

double reward_tail_integral(const SpiderModel& model, const LegFunction& g,
                            double x, int leg) {
  return leg_dplus(model, g, x, leg) * model.phi(x) -
         g.eval(x, leg) * model.phi_dS(x);
}

BoundReport finiteness_check(const SpiderModel& model, const LegFunction& g,
                             const std::vector<double>& a,
                             const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("finiteness_check: empty grid");
  BoundReport rep;
  rep.sup_ratio = 0.0;
  double cutoff = grid[grid.size() - 1 - grid.size() / 4];
  bool tail_decreasing = true;
  for (int leg = 1; leg <= model.n; ++leg) {
    double prev = std::numeric_limits<double>::infinity();
    for (double x : grid) {
      double H = harmonic_function(model, a, {x, leg});
      double ratio = std::abs(g.eval(x, leg)) / H;
      rep.sup_ratio = std::max(rep.sup_ratio, ratio);
      if (x >= cutoff) {
        if (ratio > prev + 1e-12) tail_decreasing = false;
        prev = ratio;
      }
    }
  }
  rep.bounded = tail_decreasing && std::isfinite(rep.sup_ratio);
  return rep;
}

}  // namespace spider
