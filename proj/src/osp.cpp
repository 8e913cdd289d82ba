#include "spider/osp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "spider/numerics.hpp"

namespace spider {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool StoppingRegion::empty() const {
  if (vertex_included) return false;
  for (const auto& leg : legs)
    if (!leg.empty()) return false;
  return true;
}

bool StoppingRegion::contains(double x, int leg) const {
  if (x == 0.0) return vertex_included;
  for (const auto& iv : legs[static_cast<size_t>(leg) - 1])
    if (x >= iv.lo && x <= iv.hi) return true;
  return false;
}

void StoppingRegion::normalize() {
  bool touches_zero = false;
  for (auto& leg : legs) {
    std::sort(leg.begin(), leg.end(),
              [](const LegInterval& a, const LegInterval& b) { return a.lo < b.lo; });
    std::vector<LegInterval> merged;
    for (const auto& iv : leg) {
      if (!merged.empty() && iv.lo <= merged.back().hi) {
        merged.back().hi = std::max(merged.back().hi, iv.hi);
      } else {
        merged.push_back(iv);
      }
    }
    leg = std::move(merged);
    if (!leg.empty() && leg.front().lo == 0.0) touches_zero = true;
  }
  if (touches_zero) vertex_included = true;
}

StoppingRegion StoppingRegion::upper_rays(const std::vector<double>& z) {
  StoppingRegion r;
  r.n = static_cast<int>(z.size());
  r.legs.resize(z.size());
  for (size_t i = 0; i < z.size(); ++i) r.legs[i] = {{z[i], kInf}};
  r.normalize();
  return r;
}

StoppingRegion StoppingRegion::everything(int n) {
  StoppingRegion r;
  r.n = n;
  r.legs.assign(static_cast<size_t>(n), {{0.0, kInf}});
  r.vertex_included = true;
  return r;
}

namespace {

bool segment_included(const StoppingRegion* region, Restrict restrict,
                      double mid, int leg) {
  if (restrict == Restrict::all || region == nullptr) return true;
  bool in = region->contains(mid, leg);
  return restrict == Restrict::region ? in : !in;
}

}  // namespace

double resolvent_apply(const SpiderModel& model, const LegFunction& f,
                       SpiderPoint at, const StoppingRegion* region,
                       Restrict restrict, double tol) {
  // integrability probe: |f| phi must not grow along the leg
  {
    double a = 5.0 / model.c;
    double worst = 0.0;
    for (int leg = 1; leg <= model.n; ++leg) {
      double p1 = std::abs(f.eval(a, leg)) * model.phi(a);
      double p3 = std::abs(f.eval(4.0 * a, leg)) * model.phi(4.0 * a);
      worst = std::max(worst, p3 - p1);
    }
    if (worst > 1e-9)
      throw std::runtime_error("resolvent_apply: integrability probe failed");
  }

  double total = 0.0;
  for (int leg = 1; leg <= model.n; ++leg) {
    // split at the evaluation point and at region boundaries
    std::vector<double> cuts;
    if (leg == at.leg && at.x > 0.0) cuts.push_back(at.x);
    if (region != nullptr && restrict != Restrict::all) {
      for (const auto& iv : region->legs[static_cast<size_t>(leg) - 1]) {
        if (iv.lo > 0.0) cuts.push_back(iv.lo);
        if (std::isfinite(iv.hi)) cuts.push_back(iv.hi);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double pk = model.prob(leg);
    auto integrand = [&](double y) {
      return green_kernel(model, at, {y, leg}).value * f.eval(y, leg) * pk *
             model.chars.speed_density(y);
    };

    double lo = 0.0;
    for (size_t j = 0; j <= cuts.size(); ++j) {
      double hi = j < cuts.size() ? cuts[j] : kInf;
      double mid = std::isinf(hi) ? lo + 1.0 : 0.5 * (lo + hi);
      if (segment_included(region, restrict, mid, leg))
        total += integrate_leg(integrand, lo, hi, tol);
      lo = hi;
    }
  }
  return total;
}

bool vertex_in_continuation(const SpiderModel& model, const LegFunction& g) {
  return gluing_value(model, g) > 0.0;
}

LegFunction connected_example_payoff() {
  LegFunction g;
  g.eval = [](double x, int leg) {
    switch (leg) {
      case 1: return 1.0 + x;
      case 2: return std::max(1.0 - x / 2.0, 0.0);
      default: return std::max(1.0 - 2.0 * x, 0.0);
    }
  };
  g.d_plus = [](double x, int leg) {
    switch (leg) {
      case 1: return 1.0;
      case 2: return x < 2.0 ? -0.5 : 0.0;
      default: return x < 0.5 ? -2.0 : 0.0;
    }
  };
  g.d_minus = [](double x, int leg) {
    switch (leg) {
      case 1: return 1.0;
      case 2: return x <= 2.0 ? -0.5 : 0.0;
      default: return x <= 0.5 ? -2.0 : 0.0;
    }
  };
  g.kinks = {0.5, 2.0};
  return g;
}

namespace {

void require_uniform3_brownian(const SpiderModel& model) {
  if (model.n != 3)
    throw std::invalid_argument("connected-region solver: needs n = 3");
  for (double p : model.p)
    if (std::abs(p - 1.0 / 3.0) > 1e-12)
      throw std::invalid_argument("connected-region solver: needs uniform p");
}

}  // namespace

StoppingSolution solve_spider_example71(const SpiderModel& model) {
  require_uniform3_brownian(model);
  const double th = model.c;  // theta = sqrt(2r) for the Brownian spider
  const LegFunction g = connected_example_payoff();

  StoppingSolution sol;
  sol.region.n = 3;
  sol.region.legs.resize(3);

  // F_i(x) = (p_i/c_r) (g+ phi - phi+ g) on leg i; decreasing with at most
  // one zero on the relevant bracket.
  auto F2 = [&](double x) {
    return std::exp(-th * x) / (3.0 * th) * (-0.5 + th * (1.0 - x / 2.0));
  };
  auto F3 = [&](double x) {
    return std::exp(-th * x) / (3.0 * th) * (-2.0 + th * (1.0 - 2.0 * x));
  };
  // base-point form on leg 1: (1+x) psi_tilde'(x,1) - psi_tilde(x,1)
  auto Fbar1 = [&](double x) {
    return (1.0 + x) * psi_tilde_dS(model, x, 1) - psi_tilde(model, x, 1);
  };

  if (model.r > 2.0) {
    sol.dispatch_case = 'a';
    double x2 = find_root_bracketed(F2, 0.0, 2.0).root;
    double x3 = find_root_bracketed(F3, 0.0, 0.5).root;
    sol.region.legs[0] = {{0.0, kInf}};
    sol.region.legs[1] = {{0.0, x2}};
    sol.region.legs[2] = {{0.0, x3}};
    sol.region.vertex_included = true;
    sol.thresholds = {x2, x3};
  } else if (model.r > 0.125) {
    sol.dispatch_case = 'b';
    double x2 = find_root_bracketed(F2, 0.0, 2.0).root;
    sol.region.legs[0] = {{0.0, kInf}};
    sol.region.legs[1] = {{0.0, x2}};
    sol.region.vertex_included = true;
    sol.thresholds = {x2};
  } else {
    sol.dispatch_case = 'c';
    double f0 = Fbar1(0.0);
    double z1 = 0.0;
    if (f0 < 0.0) {
      double hi = 1.0;
      while (Fbar1(hi) < 0.0) hi *= 2.0;
      z1 = find_root_bracketed(Fbar1, 0.0, hi).root;
    }
    sol.region.legs[0] = {{z1, kInf}};
    sol.region.vertex_included = (z1 == 0.0);
    sol.thresholds = {z1};
  }

  sol.value = assemble_value(model, sol.region, g);
  sol.diagnostics.gluing_value = gluing_value(model, sol.value);
  for (int leg = 1; leg <= 3; ++leg) {
    for (const auto& iv : sol.region.legs[static_cast<size_t>(leg) - 1]) {
      for (double b : {iv.lo, iv.hi}) {
        if (b > 0.0 && std::isfinite(b))
          sol.diagnostics.smooth_fit_residuals.push_back(
              smooth_fit_check(model, sol, g, {b, leg}));
      }
    }
  }
  return sol;
}

LegFunction threshold_family_payoff(PayoffFamily family,
                                    const std::vector<double>& A) {
  LegFunction g;
  if (family == PayoffFamily::linear) {
    g.eval = [A](double x, int leg) { return A[static_cast<size_t>(leg) - 1] * x; };
    g.d_plus = [A](double, int leg) { return A[static_cast<size_t>(leg) - 1]; };
    g.d_minus = g.d_plus;
    g.generator = [](double, int) { return 0.0; };
  } else {
    g.eval = [A](double x, int leg) {
      return A[static_cast<size_t>(leg) - 1] * x * x;
    };
    g.d_plus = [A](double x, int leg) {
      return 2.0 * A[static_cast<size_t>(leg) - 1] * x;
    };
    g.d_minus = g.d_plus;
    g.generator = [A](double, int leg) { return A[static_cast<size_t>(leg) - 1]; };
  }
  return g;
}

std::vector<double> threshold_equations(const SpiderModel& model,
                                        PayoffFamily family,
                                        const std::vector<double>& A,
                                        const std::vector<double>& z) {
  const double th = model.c;
  const size_t n = static_cast<size_t>(model.n);
  std::vector<double> R(n);
  if (family == PayoffFamily::linear) {
    // A_i (w_i cosh w_i - sinh w_i) = sum_k p_k A_k e^{-w_k}(1+w_k), w = theta z
    double rhs = 0.0;
    for (size_t k = 0; k < n; ++k) {
      double w = th * z[k];
      rhs += model.p[k] * A[k] * std::exp(-w) * (1.0 + w);
    }
    for (size_t i = 0; i < n; ++i) {
      double w = th * z[i];
      R[i] = A[i] * (w * std::cosh(w) - std::sinh(w)) - rhs;
    }
  } else {
    // A_i F(w_i) + sum_k p_k A_k H(w_k) = 0 with
    // F(w) = w^2 cosh w - 2w sinh w, H(w) = -e^{-w} w (w+2)
    double sum = 0.0;
    for (size_t k = 0; k < n; ++k) {
      double w = th * z[k];
      sum += model.p[k] * A[k] * (-std::exp(-w) * w * (w + 2.0));
    }
    for (size_t i = 0; i < n; ++i) {
      double w = th * z[i];
      R[i] = A[i] * (w * w * std::cosh(w) - 2.0 * w * std::sinh(w)) + sum;
    }
  }
  return R;
}

namespace {

// Symmetric scalar threshold used as the Newton start: replace every A_i by
// the average sum p_k A_k, which reduces the system to one equation.
double symmetric_start(const SpiderModel& model, PayoffFamily family) {
  auto scalar = [&](double w) {
    if (family == PayoffFamily::linear)
      return w * std::cosh(w) - std::sinh(w) - std::exp(-w) * (1.0 + w);
    return w * w * std::cosh(w) - 2.0 * w * std::sinh(w) -
           std::exp(-w) * w * (w + 2.0);
  };
  double hi = 1.0;
  while (scalar(hi) < 0.0 && hi < 64.0) hi *= 2.0;
  double w = find_root_bracketed(scalar, 1e-6, hi).root;
  return w / model.c;
}

}  // namespace

StoppingSolution solve_threshold_system(const SpiderModel& model,
                                        PayoffFamily family,
                                        const std::vector<double>& A) {
  if (A.size() != static_cast<size_t>(model.n))
    throw std::invalid_argument("solve_threshold_system: |A| != n");
  for (double a : A)
    if (!(a > 0.0))
      throw std::invalid_argument("solve_threshold_system: A must be positive");

  const LegFunction g = threshold_family_payoff(family, A);
  RewardDecomposition rd = reward_decomposition(model, g);

  std::vector<double> z0(static_cast<size_t>(model.n),
                         symmetric_start(model, family));
  auto F = [&](const std::vector<double>& z) {
    return threshold_equations(model, family, A, z);
  };
  std::vector<double> z = solve_system(F, z0, 1e-10);

  StoppingSolution sol;
  sol.thresholds = z;
  sol.region = StoppingRegion::upper_rays(z);
  // linear solves away from r = 1/2 have no published reference values
  sol.diagnostics.paper_validated =
      !(family == PayoffFamily::linear && std::abs(model.r - 0.5) > 1e-12);

  // V = G_r(1_Sigma f) + vertex term (zero here: the vertex is not in Sigma)
  StoppingRegion region = sol.region;
  LegFunction fdens = rd.f_density;
  double delta0 = rd.delta0;
  LegFunction value;
  value.fd_step = 1e-3;
  value.kinks = z;
  value.eval = [model, fdens, region, delta0](double x, int leg) {
    double v = resolvent_apply(model, fdens, {x, leg}, &region, Restrict::region);
    if (region.vertex_included)
      v += green_kernel(model, {x, leg}, vertex()).value * delta0;
    return v;
  };
  sol.value = std::move(value);

  sol.diagnostics.gluing_value = gluing_value(model, sol.value);
  for (int i = 1; i <= model.n; ++i) {
    double zi = z[static_cast<size_t>(i) - 1];
    double res = resolvent_apply(model, rd.f_density, {zi, i}, &sol.region,
                                 Restrict::complement);
    if (!sol.region.vertex_included)
      res += green_kernel(model, {zi, i}, vertex()).value * rd.delta0;
    sol.diagnostics.boundary_residuals.push_back(res);
    sol.diagnostics.smooth_fit_residuals.push_back(
        smooth_fit_check(model, sol, g, {zi, i}));
  }
  return sol;
}

namespace {

struct VertexComponent {
  bool present = false;
  std::vector<double> a;  // harmonic coefficients per leg
  double a_sum = 0.0;
  std::vector<double> extent;  // first region point per leg (inf if none)
};

VertexComponent solve_vertex_component(const SpiderModel& model,
                                       const StoppingRegion& region,
                                       const LegFunction& payoff) {
  VertexComponent vc;
  if (region.vertex_included) return vc;
  vc.present = true;
  const size_t n = static_cast<size_t>(model.n);
  vc.a.assign(n, 0.0);
  vc.extent.assign(n, kInf);
  std::vector<size_t> bounded;
  for (size_t i = 0; i < n; ++i) {
    const auto& ivs = region.legs[i];
    if (!ivs.empty()) {
      vc.extent[i] = ivs.front().lo;
      bounded.push_back(i);
    }
  }
  // Legs without any stopping interval force a_i = 0 (the value must stay
  // bounded by a phi multiple there); match the payoff at each boundary.
  const size_t m = bounded.size();
  if (m == 0)
    throw std::invalid_argument("assemble_value: region is empty");
  std::vector<std::vector<double>> M(m, std::vector<double>(m, 0.0));
  std::vector<double> rhs(m);
  for (size_t r = 0; r < m; ++r) {
    size_t j = bounded[r];
    double b = vc.extent[j];
    for (size_t c = 0; c < m; ++c) {
      size_t k = bounded[c];
      M[r][c] = model.phi(b);
      if (k == j) M[r][c] += model.c / model.p[j] * model.psi(b);
    }
    rhs[r] = payoff.eval(b, static_cast<int>(j) + 1);
  }
  std::vector<double> sol = solve_dense(M, rhs);
  for (size_t r = 0; r < m; ++r) vc.a[bounded[r]] = sol[r];
  for (double ak : vc.a) vc.a_sum += ak;
  return vc;
}

// E_x[e^{-r H_{lo}}; before hi] and the hi-counterpart on an interior
// continuation interval, built from phi and the killed increasing solution.
double two_sided_value(const SpiderModel& model, double x, double lo,
                       double hi, double g_lo, double g_hi) {
  double den_lo = model.phi(lo) * model.psi(hi) - model.psi(lo) * model.phi(hi);
  double u_lo = (model.phi(x) * model.psi(hi) - model.psi(x) * model.phi(hi)) / den_lo;
  double u_hi = (model.psi(x) * model.phi(lo) - model.phi(x) * model.psi(lo)) / den_lo;
  return g_lo * u_lo + g_hi * u_hi;
}

}  // namespace

LegFunction assemble_value(const SpiderModel& model,
                           const StoppingRegion& region,
                           const LegFunction& payoff) {
  if (region.empty())
    throw std::invalid_argument("assemble_value: region is empty");

  auto vc = std::make_shared<VertexComponent>(
      solve_vertex_component(model, region, payoff));

  LegFunction v;
  v.fd_step = 1e-6;
  for (const auto& ivs : region.legs)
    for (const auto& iv : ivs) {
      if (iv.lo > 0.0) v.kinks.push_back(iv.lo);
      if (std::isfinite(iv.hi)) v.kinks.push_back(iv.hi);
    }
  for (double k : payoff.kinks) v.kinks.push_back(k);

  v.eval = [model, region, payoff, vc](double x, int leg) {
    if (region.contains(x, leg)) return payoff.eval(x, leg);
    const auto& ivs = region.legs[static_cast<size_t>(leg) - 1];
    // locate the continuation component containing x
    double lo = 0.0, hi = kInf;
    for (const auto& iv : ivs) {
      if (x < iv.lo) {
        hi = iv.lo;
        break;
      }
      lo = iv.hi;
    }
    if (lo == 0.0 && !region.vertex_included) {
      // component attached to the vertex: spider-harmonic interpolation
      const double ai = vc->a[static_cast<size_t>(leg) - 1];
      return ai * model.c / model.prob(leg) * model.psi(x) +
             model.phi(x) * vc->a_sum;
    }
    double g_lo = lo == 0.0 ? payoff.eval(0.0, leg) : payoff.eval(lo, leg);
    if (std::isinf(hi)) return g_lo * model.phi(x) / model.phi(lo);
    return two_sided_value(model, x, lo, hi, g_lo, payoff.eval(hi, leg));
  };
  return v;
}

bool VerificationReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

double smooth_fit_check(const SpiderModel& model, const StoppingSolution& sol,
                        const LegFunction& payoff, SpiderPoint boundary) {
  if (boundary.is_vertex())
    throw std::invalid_argument("smooth_fit_check: boundary at the vertex");
  const double eps = 1e-9 * (1.0 + boundary.x);
  bool cont_left = !sol.region.contains(boundary.x - eps, boundary.leg);
  bool cont_right = !sol.region.contains(boundary.x + eps, boundary.leg);
  if (cont_left == cont_right)
    throw std::invalid_argument("smooth_fit_check: not a one-sided boundary");
  double dv, dg;
  if (cont_left) {
    dv = leg_dminus(model, sol.value, boundary.x, boundary.leg);
    dg = leg_dminus(model, payoff, boundary.x, boundary.leg);
  } else {
    dv = leg_dplus(model, sol.value, boundary.x, boundary.leg);
    dg = leg_dplus(model, payoff, boundary.x, boundary.leg);
  }
  return std::abs(dv - dg);
}

VerificationReport verify_solution(const SpiderModel& model,
                                   const LegFunction& payoff,
                                   const StoppingSolution& sol,
                                   const std::vector<double>& grid,
                                   double tol) {
  VerificationReport rep;
  RewardDecomposition rd = reward_decomposition(model, payoff);

  // (1) majorant
  double min_gap = kInf;
  for (int leg = 1; leg <= model.n; ++leg)
    for (double x : grid)
      min_gap = std::min(min_gap,
                         sol.value.eval(x, leg) - payoff.eval(x, leg));
  min_gap = std::min(min_gap, sol.value.eval(0.0, 1) - payoff.eval(0.0, 1));
  rep.checks.push_back({"majorant", min_gap >= -tol, min_gap});

  // (2) excessivity of the value
  ExcessivityReport ex =
      is_excessive(model, sol.value, grid, {tol, tol});
  rep.checks.push_back({"excessive", ex.excessive,
                        std::max(ex.gluing, -ex.min_tail_value)});

  // (3) boundary equation residuals
  double worst_res = 0.0;
  bool res_ok = true;
  for (int leg = 1; leg <= model.n; ++leg) {
    for (const auto& iv : sol.region.legs[static_cast<size_t>(leg) - 1]) {
      for (double b : {iv.lo, iv.hi}) {
        if (!(b > 0.0) || !std::isfinite(b)) continue;
        double res = resolvent_apply(model, rd.f_density, {b, leg},
                                     &sol.region, Restrict::complement);
        if (!sol.region.vertex_included)
          res += green_kernel(model, {b, leg}, vertex()).value * rd.delta0;
        worst_res = std::max(worst_res, std::abs(res));
        if (std::abs(res) > tol) res_ok = false;
      }
    }
  }
  rep.checks.push_back({"boundary-equation", res_ok, worst_res});

  // (4) density sign on the stopping region
  double worst_f = 0.0;
  bool sign_ok = true;
  for (int leg = 1; leg <= model.n; ++leg)
    for (double x : grid)
      if (sol.region.contains(x, leg)) {
        double fx = rd.f_density.eval(x, leg);
        worst_f = std::min(worst_f, fx);
        if (fx < -tol) sign_ok = false;
      }
  rep.checks.push_back({"density-sign", sign_ok, worst_f});

  // (5) vertex condition
  bool vertex_ok = !(rd.delta0 < 0.0 && sol.region.vertex_included);
  rep.checks.push_back({"vertex-condition", vertex_ok, rd.delta0});

  // (6) smooth fit
  double worst_sf = 0.0;
  bool sf_ok = true;
  for (int leg = 1; leg <= model.n; ++leg) {
    for (const auto& iv : sol.region.legs[static_cast<size_t>(leg) - 1]) {
      for (double b : {iv.lo, iv.hi}) {
        if (!(b > 0.0) || !std::isfinite(b)) continue;
        double res = smooth_fit_check(model, sol, payoff, {b, leg});
        worst_sf = std::max(worst_sf, res);
        if (res > tol) sf_ok = false;
      }
    }
  }
  rep.checks.push_back({"smooth-fit", sf_ok, worst_sf});
  return rep;
}

}  // namespace spider
