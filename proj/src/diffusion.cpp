#include "spider/diffusion.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "spider/numerics.hpp"

namespace spider {

double DiffusionCharacteristics::scale_derivative(
    const std::function<double(double)>& f, double x) const {
  double h = fd_step * (1.0 + std::abs(x));
  double df = (f(x + h) - f(x - h)) / (2.0 * h);
  double dS = (scale(x + h) - scale(x - h)) / (2.0 * h);
  return df / dS;
}

double DiffusionCharacteristics::dphi_dS(double x, double r) const {
  if (phi_dS) return phi_dS(x, r);
  return scale_derivative([&](double y) { return phi(std::max(y, 0.0), r); }, x);
}

double DiffusionCharacteristics::dpsi_dS(double x, double r) const {
  if (psi_killed_dS) return psi_killed_dS(x, r);
  // psi_killed is odd through 0 only formally; reflect for the FD stencil
  return scale_derivative(
      [&](double y) {
        return y >= 0.0 ? psi_killed(y, r) : -psi_killed(-y, r);
      },
      x);
}

DiffusionCharacteristics brownian_characteristics() {
  DiffusionCharacteristics c;
  c.phi = [](double x, double r) { return std::exp(-std::sqrt(2.0 * r) * x); };
  c.psi_killed = [](double x, double r) {
    double th = std::sqrt(2.0 * r);
    return std::sinh(th * x) / th;
  };
  c.scale = [](double x) { return x; };
  c.speed_density = [](double) { return 2.0; };
  c.c_r = [](double r) { return std::sqrt(2.0 * r); };
  c.phi_dS = [](double x, double r) {
    double th = std::sqrt(2.0 * r);
    return -th * std::exp(-th * x);
  };
  c.psi_killed_dS = [](double x, double r) {
    return std::cosh(std::sqrt(2.0 * r) * x);
  };
  c.log_phi = [](double x, double r) { return -std::sqrt(2.0 * r) * x; };
  return c;
}

namespace {

std::map<std::string, std::function<DiffusionCharacteristics()>>& registry() {
  static std::map<std::string, std::function<DiffusionCharacteristics()>> reg = {
      {"brownian", brownian_characteristics}};
  return reg;
}

}  // namespace

void register_characteristics(const std::string& name,
                              std::function<DiffusionCharacteristics()> factory) {
  registry()[name] = std::move(factory);
}

DiffusionCharacteristics characteristics_by_name(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end())
    throw std::invalid_argument("unknown characteristics: " + name);
  return it->second();
}

SpiderModel make_spider_model(int n, std::vector<double> p, double r,
                              DiffusionCharacteristics chars) {
  if (n < 1) throw std::invalid_argument("spider model: n must be positive");
  if (static_cast<int>(p.size()) != n)
    throw std::invalid_argument("spider model: p has wrong length");
  double sum = std::accumulate(p.begin(), p.end(), 0.0);
  for (double pi : p)
    if (!(pi > 0.0))
      throw std::invalid_argument("spider model: every p_i must be > 0");
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("spider model: p must sum to 1");
  if (!(r > 0.0)) throw std::invalid_argument("spider model: r must be > 0");
  SpiderModel m;
  m.n = n;
  m.p = std::move(p);
  m.r = r;
  m.chars = std::move(chars);
  m.c = m.chars.c_r(r);
  if (!(m.c > 0.0)) throw std::invalid_argument("spider model: c_r must be > 0");
  return m;
}

SpiderModel brownian_spider(int n, std::vector<double> p, double r) {
  return make_spider_model(n, std::move(p), r, brownian_characteristics());
}

CharacteristicsReport validate_characteristics(
    const DiffusionCharacteristics& chars, double r,
    const std::vector<double>& grid, double fd_step) {
  if (grid.empty())
    throw std::invalid_argument("validate_characteristics: empty grid");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1])))
      throw std::invalid_argument(
          "validate_characteristics: grid must be positive and increasing");
  }

  CharacteristicsReport rep;
  rep.phi0_error = std::abs(chars.phi(0.0, r) - 1.0);
  rep.psi0_error = std::abs(chars.psi_killed(0.0, r));

  auto scale_deriv = [&](auto&& f, double x) {
    double h = fd_step * (1.0 + std::abs(x));
    double df = (f(x + h) - f(x - h)) / (2.0 * h);
    double dS = (chars.scale(x + h) - chars.scale(x - h)) / (2.0 * h);
    return df / dS;
  };

  double prev_phi = chars.phi(0.0, r);
  double prev_psi = chars.psi_killed(0.0, r);
  for (double x : grid) {
    try {
      double phi = chars.phi(x, r);
      double psi = chars.psi_killed(x, r);
      if (!(phi < prev_phi)) rep.phi_decreasing = false;
      if (!(psi > prev_psi)) rep.psi_increasing = false;
      prev_phi = phi;
      prev_psi = psi;
      double dphi = scale_deriv([&](double y) { return chars.phi(y, r); }, x);
      double dpsi = scale_deriv(
          [&](double y) {
            return y >= 0.0 ? chars.psi_killed(y, r) : -chars.psi_killed(-y, r);
          },
          x);
      double wron = dpsi * phi - dphi * psi;
      rep.max_wronskian_residual =
          std::max(rep.max_wronskian_residual, std::abs(wron - 1.0));
    } catch (const std::exception& e) {
      rep.failures.push_back("x=" + std::to_string(x) + ": " + e.what());
    }
  }

  // dpsi/dS(0+) = 1 and c_r vs one-sided difference of phi at 0+
  try {
    double h = fd_step;
    double dS = (chars.scale(2.0 * h) - chars.scale(0.0)) / (2.0 * h);
    double dpsi0 = (-1.5 * chars.psi_killed(0.0, r) +
                    2.0 * chars.psi_killed(h, r) -
                    0.5 * chars.psi_killed(2.0 * h, r)) /
                   h / dS;
    rep.psi_slope_error = std::abs(dpsi0 - 1.0);
    double dphi0 = (-1.5 * chars.phi(0.0, r) + 2.0 * chars.phi(h, r) -
                    0.5 * chars.phi(2.0 * h, r)) /
                   h / dS;
    rep.c_r_residual = std::abs(-dphi0 - chars.c_r(r));
  } catch (const std::exception& e) {
    rep.failures.push_back(std::string("boundary checks: ") + e.what());
  }
  return rep;
}

}  // namespace spider
