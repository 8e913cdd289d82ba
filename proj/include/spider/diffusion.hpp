#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spider {

/// Characteristics of one recurrent linear diffusion on [0,inf), reflected at
/// 0: the decreasing solution phi, the increasing solution psi of the killed
/// process, scale S (S(0)=0), speed density m' (m({0})=0), and the constant
/// c_r = -dphi/dS(0+). Normalizations: phi(0,r)=1, psi_killed(0,r)=0,
/// d(psi_killed)/dS(0+)=1.
///
/// Closed-form scale derivatives and log(phi) are optional; when absent,
/// central finite differences are used.
struct DiffusionCharacteristics {
  std::function<double(double, double)> phi;          // (x, r)
  std::function<double(double, double)> psi_killed;   // (x, r)
  std::function<double(double)> scale;                // S(x)
  std::function<double(double)> speed_density;        // m'(x)
  std::function<double(double)> c_r;                  // r -> c_r

  // optional closed forms
  std::function<double(double, double)> phi_dS;         // dphi/dS
  std::function<double(double, double)> psi_killed_dS;  // dpsi/dS
  std::function<double(double, double)> log_phi;

  double fd_step = 1e-6;  // relative to |x|+1

  // Scale derivatives: closed form when supplied, otherwise
  // (df/dx)/(dS/dx) by central differences.
  double dphi_dS(double x, double r) const;
  double dpsi_dS(double x, double r) const;
  double scale_derivative(const std::function<double(double)>& f, double x) const;
};

DiffusionCharacteristics brownian_characteristics();

/// Characteristics registry: "brownian" is built in, plug-ins may register
/// additional names.
void register_characteristics(const std::string& name,
                              std::function<DiffusionCharacteristics()> factory);
DiffusionCharacteristics characteristics_by_name(const std::string& name);

struct SpiderModel {
  int n = 0;
  std::vector<double> p;  // leg probabilities, 1-based access via p[leg-1]
  double r = 0.0;
  DiffusionCharacteristics chars;
  double c = 0.0;  // cached c_r(r)

  double phi(double x) const { return chars.phi(x, r); }
  double psi(double x) const { return chars.psi_killed(x, r); }
  double phi_dS(double x) const { return chars.dphi_dS(x, r); }
  double psi_dS(double x) const { return chars.dpsi_dS(x, r); }
  double prob(int leg) const { return p[static_cast<size_t>(leg) - 1]; }
};

SpiderModel make_spider_model(int n, std::vector<double> p, double r,
                              DiffusionCharacteristics chars);
SpiderModel brownian_spider(int n, std::vector<double> p, double r);

/// A point on the star graph. Every (0, i) is the vertex; equality, ordering
/// and hashing identify them.
struct SpiderPoint {
  double x = 0.0;
  int leg = 1;

  bool is_vertex() const { return x == 0.0; }
  friend bool operator==(const SpiderPoint& a, const SpiderPoint& b) {
    if (a.is_vertex() && b.is_vertex()) return true;
    return a.x == b.x && a.leg == b.leg;
  }
};

inline SpiderPoint vertex() { return {0.0, 1}; }

struct SpiderPointHash {
  size_t operator()(const SpiderPoint& p) const {
    if (p.is_vertex()) return 0;
    size_t h = std::hash<double>{}(p.x);
    return h ^ (std::hash<int>{}(p.leg) + 0x9e3779b97f4a7c15ULL + (h << 6));
  }
};

struct CharacteristicsReport {
  double max_wronskian_residual = 0.0;
  double phi0_error = 0.0;   // |phi(0)-1|
  double psi0_error = 0.0;   // |psi(0)|
  double psi_slope_error = 0.0;  // |dpsi/dS(0+)-1|
  double c_r_residual = 0.0;     // vs one-sided difference at 0+
  bool phi_decreasing = true;
  bool psi_increasing = true;
  std::vector<std::string> failures;  // per-grid-point evaluation errors

  bool passes(double tol = 1e-8) const {
    return failures.empty() && max_wronskian_residual < tol &&
           phi0_error < tol && psi0_error < tol && phi_decreasing &&
           psi_increasing;
  }
};

/// Numeric check of the normalization conventions on a grid. Evaluation
/// failures at single points are reported, not fatal.
CharacteristicsReport validate_characteristics(
    const DiffusionCharacteristics& chars, double r,
    const std::vector<double>& grid, double fd_step = 1e-5);

}  // namespace spider
