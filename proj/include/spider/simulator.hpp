#pragma once

#include <cstdint>

#include "spider/osp.hpp"

namespace spider {

/// Lattice spider walk: step h, time h^2 per step (Brownian scaling).
struct SimConfig {
  double step = 0.01;
  long long paths = 10000;
  double horizon = 50.0;
  std::uint64_t seed = 1;
  bool antithetic = false;
  bool parallel = true;
};

struct EstimateWithError {
  double mean = 0.0;
  double std_error = 0.0;
  long long paths_used = 0;
  double censor_rate = 0.0;
  bool censor_warning = false;   // set when > 1% of paths hit the horizon
  double horizon_discount = 0.0; // e^{-r*horizon}, scales the censoring bias
  bool target_snapped = false;   // hitting target moved onto the lattice
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// One walker with its own counter-based random stream, so path results do
/// not depend on how paths are distributed across threads. Antithetic
/// walkers flip every bit and reflect every uniform draw.
struct Walker {
  Walker(const SpiderModel& model, double step, std::uint64_t seed,
         std::uint64_t stream, bool flip = false)
      : h(step), cum_(model.p), flip_(flip) {
    for (size_t i = 1; i < cum_.size(); ++i) cum_[i] += cum_[i - 1];
    state_ = seed ^ (0xD1B54A32D192ED03ULL * (stream + 1));
    detail::splitmix64(state_);
    detail::splitmix64(state_);
  }

  long long pos = 0;
  int leg = 1;
  unsigned long long steps = 0;
  double h;

  double position() const { return static_cast<double>(pos) * h; }

  std::uint64_t next_u64() { return detail::splitmix64(state_); }

  bool next_bit() {
    if (nbits_ == 0) {
      bits_ = next_u64();
      nbits_ = 64;
    }
    bool b = bits_ & 1u;
    bits_ >>= 1;
    --nbits_;
    return flip_ ? !b : b;
  }

  double next_unit() {
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return flip_ ? 1.0 - u : u;
  }

  void advance() {
    if (pos == 0) {
      double u = next_unit();
      int i = 0;
      while (i + 1 < static_cast<int>(cum_.size()) && u >= cum_[static_cast<size_t>(i)]) ++i;
      leg = i + 1;
      pos = 1;
    } else {
      pos += next_bit() ? 1 : -1;
    }
    ++steps;
  }

 private:
  std::vector<double> cum_;
  std::uint64_t state_ = 0;
  std::uint64_t bits_ = 0;
  int nbits_ = 0;
  bool flip_;
};

/// E[e^{-r tau} g(X_tau)] for tau = first entry into the region; censored
/// paths contribute 0.
EstimateWithError simulate_discounted_stop(const SpiderModel& model,
                                           SpiderPoint start,
                                           const StoppingRegion& region,
                                           const LegFunction& payoff,
                                           const SimConfig& cfg);

/// E[e^{-r H_target}]; the target is snapped onto the lattice.
EstimateWithError simulate_hitting_laplace(const SpiderModel& model,
                                           SpiderPoint start,
                                           SpiderPoint target,
                                           const SimConfig& cfg);

/// Discounted occupation integral: sum of e^{-r t} f(X_t) h^2 up to the
/// horizon.
EstimateWithError simulate_resolvent(const SpiderModel& model,
                                     SpiderPoint start, const LegFunction& f,
                                     const SimConfig& cfg);

}  // namespace spider
