#pragma once

#include <string>

#include "vswalk/backend.hpp"
#include "vswalk/constants.hpp"

namespace vswalk {

enum class StepMode { full, minimizing, signed_measure, flow };

StepMode parse_step_mode(const std::string& s);
std::string to_string(StepMode m);
Construction construction_of(StepMode m);

// Normalized step density. Reference measures: the normalized uniform measure on unit directions
// (Riemannian and flow modes), and dOmega x dp_z on the unit cylinder (Carnot geodesic modes).
class StepDensity {
 public:
  const Backend& backend() const { return backend_; }
  const Vec& base_point() const { return q_; }
  double c() const { return c_; }
  double eps() const { return eps_; }
  double scale() const { return c_ * eps_; }
  StepMode mode() const { return mode_; }
  bool is_probability() const { return mode_ != StepMode::signed_measure; }

  // Normalizing constant of the unnormalized density below.
  double norm_constant() const { return norm_; }
  // Density without normalization; the weight enters as exp(h(.) - h(q)).
  double unnormalized(const Direction& dir) const;
  double value(const Direction& dir) const { return unnormalized(dir) / norm_; }
  bool in_support(const Direction& dir) const;
  // Largest |p_z| in the support (+inf for the full and signed constructions).
  double pz_bound() const;
  // Marginal density of p_z for Carnot geodesic modes with constant weight.
  double pz_marginal(double pz) const;

 private:
  friend StepDensity geodesic_step_density(const Backend&, const Vec&, double, double, StepMode);
  friend StepDensity flow_step_density(const Backend&, const Vec&, double, double);
  StepDensity(Backend b, Vec q, double c, double eps, StepMode mode);

  Backend backend_;
  Vec q_;
  double c_, eps_;
  StepMode mode_;
  double norm_ = 1.0;
  double h_q_ = 0.0;
  double kernel_total_ = 0.0;  // sum_i int g_i over the mode's w-range (Carnot, constant weight)
};

StepDensity geodesic_step_density(const Backend& b, const Vec& q, double c, double eps, StepMode mode);
StepDensity flow_step_density(const Backend& b, const Vec& q, double c, double eps);

// density(l2) / density(l1); NumericalError when density(l1) is zero.
double likelihood_ratio(const StepDensity& density, const Direction& l1, const Direction& l2);

// Orthonormal basis (e1, e2) of the tangent plane of the unit sphere at q.
std::pair<Vec, Vec> sphere_tangent_basis(const Vec& q);

// Weighted sphere average of f over S^{n-1} using product rules of increasing order until the
// relative change drops below tol. Returns (value, last change).
template <class F>
std::pair<double, double> converged_sphere_average(int n, F&& f, double tol = 1e-13, int m0 = 8, int m_max = 96);

}  // namespace vswalk

#include "vswalk/quadrature.hpp"

namespace vswalk {

template <class F>
std::pair<double, double> converged_sphere_average(int n, F&& f, double tol, int m0, int m_max) {
  auto eval = [&](int m) {
    SphereRule r = sphere_rule(n, m);
    double s = 0.0;
    Vec u(n);
    for (std::size_t j = 0; j < r.size(); ++j) {
      for (int k = 0; k < n; ++k) u[k] = r.point(j)[k];
      s += r.weights[j] * f(u);
    }
    return s;
  };
  double prev = eval(m0);
  for (int m = 2 * m0; m <= m_max; m *= 2) {
    double cur = eval(m);
    double change = std::abs(cur - prev);
    if (change <= tol * std::max(1.0, std::abs(cur))) return {cur, change};
    prev = cur;
  }
  throw NumericalError("sphere average did not converge");
}

}  // namespace vswalk
