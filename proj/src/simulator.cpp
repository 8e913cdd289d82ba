#include "spider/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace spider {

namespace {

struct PathResult {
  double value = 0.0;
  bool censored = false;
};

double pairwise_sum(const double* v, size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

void check_config(const SimConfig& cfg) {
  if (!(cfg.step > 0.0)) throw std::invalid_argument("simulate: step <= 0");
  if (cfg.paths < 1) throw std::invalid_argument("simulate: paths < 1");
  if (!(cfg.horizon > 0.0)) throw std::invalid_argument("simulate: horizon <= 0");
}

// Path results are stored per path and aggregated sequentially, so the
// parallel and serial runs produce bit-identical estimates.
template <typename Kernel>
EstimateWithError run_paths(const SpiderModel& model, const SimConfig& cfg,
                            const Kernel& kernel) {
  check_config(cfg);
  long long m = cfg.paths;
  if (cfg.antithetic && m % 2 != 0) ++m;
  std::vector<double> vals(static_cast<size_t>(m));
  std::vector<char> cens(static_cast<size_t>(m));

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64) if (cfg.parallel)
#endif
  for (long long i = 0; i < m; ++i) {
    std::uint64_t stream = cfg.antithetic ? static_cast<std::uint64_t>(i / 2)
                                          : static_cast<std::uint64_t>(i);
    bool flip = cfg.antithetic && (i % 2 == 1);
    Walker w(model, cfg.step, cfg.seed, stream, flip);
    PathResult r = kernel(w);
    vals[static_cast<size_t>(i)] = r.value;
    cens[static_cast<size_t>(i)] = r.censored ? 1 : 0;
  }

  std::vector<double> samples;
  if (cfg.antithetic) {
    samples.resize(static_cast<size_t>(m / 2));
    for (long long i = 0; i < m / 2; ++i)
      samples[static_cast<size_t>(i)] =
          0.5 * (vals[static_cast<size_t>(2 * i)] +
                 vals[static_cast<size_t>(2 * i + 1)]);
  } else {
    samples = std::move(vals);
  }

  EstimateWithError est;
  est.paths_used = static_cast<long long>(samples.size());
  est.mean = pairwise_sum(samples.data(), samples.size()) /
             static_cast<double>(samples.size());
  if (samples.size() > 1) {
    std::vector<double> sq(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
      double d = samples[i] - est.mean;
      sq[i] = d * d;
    }
    double var = pairwise_sum(sq.data(), sq.size()) /
                 static_cast<double>(samples.size() - 1);
    est.std_error = std::sqrt(var / static_cast<double>(samples.size()));
  }
  long long ncens = 0;
  for (char c : cens) ncens += c;
  est.censor_rate = static_cast<double>(ncens) / static_cast<double>(m);
  est.censor_warning = est.censor_rate > 0.01;
  est.horizon_discount = std::exp(-model.r * cfg.horizon);
  return est;
}

// Region boundaries converted to lattice indices once, outside the hot loop.
struct LatticeRegion {
  struct Interval {
    long long lo, hi;
  };
  std::vector<std::vector<Interval>> legs;
  bool vertex = false;

  LatticeRegion(const StoppingRegion& r, double h) : vertex(r.vertex_included) {
    const long long big = std::numeric_limits<long long>::max() / 2;
    legs.resize(r.legs.size());
    for (size_t i = 0; i < r.legs.size(); ++i) {
      for (const auto& iv : r.legs[i]) {
        long long lo = static_cast<long long>(std::ceil(iv.lo / h - 1e-9));
        long long hi = std::isfinite(iv.hi)
                           ? static_cast<long long>(std::floor(iv.hi / h + 1e-9))
                           : big;
        if (lo <= hi) legs[i].push_back({std::max<long long>(lo, 0), hi});
      }
    }
  }

  bool contains(long long pos, int leg) const {
    if (pos == 0) return vertex;
    for (const auto& iv : legs[static_cast<size_t>(leg) - 1])
      if (pos >= iv.lo && pos <= iv.hi) return true;
    return false;
  }
};

long long snap(double x, double h) { return std::llround(x / h); }

}  // namespace

EstimateWithError simulate_discounted_stop(const SpiderModel& model,
                                           SpiderPoint start,
                                           const StoppingRegion& region,
                                           const LegFunction& payoff,
                                           const SimConfig& cfg) {
  if (region.empty())
    throw std::invalid_argument("simulate_discounted_stop: empty region");
  const LatticeRegion lr(region, cfg.step);
  const long long pos0 = snap(start.x, cfg.step);
  const int leg0 = start.leg;
  const unsigned long long max_steps = static_cast<unsigned long long>(
      std::llround(cfg.horizon / (cfg.step * cfg.step)));
  const double rh2 = model.r * cfg.step * cfg.step;

  return run_paths(model, cfg, [&](Walker& w) -> PathResult {
    w.pos = pos0;
    w.leg = leg0;
    while (true) {
      if (lr.contains(w.pos, w.leg))
        return {payoff.eval(w.position(), w.leg) *
                    std::exp(-rh2 * static_cast<double>(w.steps)),
                false};
      if (w.steps >= max_steps) return {0.0, true};
      w.advance();
    }
  });
}

EstimateWithError simulate_hitting_laplace(const SpiderModel& model,
                                           SpiderPoint start,
                                           SpiderPoint target,
                                           const SimConfig& cfg) {
  const long long pos0 = snap(start.x, cfg.step);
  const long long tpos = snap(target.x, cfg.step);
  const int tleg = target.leg;
  const unsigned long long max_steps = static_cast<unsigned long long>(
      std::llround(cfg.horizon / (cfg.step * cfg.step)));
  const double rh2 = model.r * cfg.step * cfg.step;
  bool snapped =
      std::abs(static_cast<double>(tpos) * cfg.step - target.x) > 1e-12;

  EstimateWithError est = run_paths(model, cfg, [&](Walker& w) -> PathResult {
    w.pos = pos0;
    w.leg = start.leg;
    while (true) {
      if (w.pos == tpos && (tpos == 0 || w.leg == tleg))
        return {std::exp(-rh2 * static_cast<double>(w.steps)), false};
      if (w.steps >= max_steps) return {0.0, true};
      w.advance();
    }
  });
  est.target_snapped = snapped;
  return est;
}

EstimateWithError simulate_resolvent(const SpiderModel& model,
                                     SpiderPoint start, const LegFunction& f,
                                     const SimConfig& cfg) {
  const long long pos0 = snap(start.x, cfg.step);
  const unsigned long long max_steps = static_cast<unsigned long long>(
      std::llround(cfg.horizon / (cfg.step * cfg.step)));
  const double h2 = cfg.step * cfg.step;
  const double df = std::exp(-model.r * h2);

  return run_paths(model, cfg, [&](Walker& w) -> PathResult {
    w.pos = pos0;
    w.leg = start.leg;
    // midpoint discounting removes the O(h^2) left-endpoint Riemann bias
    double disc = std::exp(-0.5 * model.r * h2);
    double acc = 0.0;
    while (w.steps < max_steps) {
      acc += disc * f.eval(w.position(), w.leg) * h2;
      disc *= df;
      w.advance();
    }
    return {acc, false};
  });
}

}  // namespace spider
