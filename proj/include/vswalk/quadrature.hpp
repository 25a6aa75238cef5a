#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "vswalk/errors.hpp"
#include "vswalk/types.hpp"

namespace vswalk {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

template <class F>
struct SimpsonState {
  F& f;
  int max_depth;
  std::int64_t evals = 0;
  double error = 0.0;
  bool failed = false;
};

template <class F>
double simpson_step(SimpsonState<F>& st, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double flm = st.f(0.5 * (a + m));
  const double frm = st.f(0.5 * (m + b));
  st.evals += 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(left) + std::abs(right));
  if (std::abs(delta) <= 15.0 * tol || std::abs(delta) <= roundoff) {
    st.error += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  if (depth >= st.max_depth || st.evals > 200'000'000) {
    st.failed = true;
    st.error += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return simpson_step(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_step(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace detail

// Adaptive Simpson with Richardson correction on a finite interval.
// Throws NumericalError when a branch hits max_depth without meeting its tolerance.
template <class F>
QuadResult adaptive_quad(F&& f, double a, double b, double tol, int max_depth = 40) {
  require(std::isfinite(a) && std::isfinite(b), "adaptive_quad: bounds must be finite (truncate first)");
  require(tol > 0.0, "adaptive_quad: tolerance must be positive");
  if (a == b) return {};
  detail::SimpsonState<std::remove_reference_t<F>> st{f, max_depth};
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double v = detail::simpson_step(st, a, b, fa, fm, fb, whole, tol, 0);
  if (st.failed) throw NumericalError("adaptive quadrature did not converge within depth " + std::to_string(max_depth));
  return {v, st.error};
}

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached and thread-safe; n in [1, 512].
const GaussRule& gauss_legendre(int n);

template <class F>
double gauss_panel(F&& f, double a, double b, const GaussRule& rule) {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return half * s;
}

// Product rule on S^{n-1} with weights summing to 1, exact for polynomials of degree <= 2m-1.
struct SphereRule {
  int dim = 0;
  std::vector<double> coords;  // size() * dim, row-major
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  const double* point(std::size_t i) const { return coords.data() + i * dim; }
};

SphereRule sphere_rule(int n, int m);

// Gauss rule for the weight (1 - t^2)^(lambda - 1/2) on [-1, 1], weights summing to 1.
GaussRule gauss_gegenbauer(int m, double lambda);

// Splits [a, b] at the given sorted breakpoints and further so no panel exceeds max_width.
std::vector<double> panel_edges(double a, double b, const std::vector<double>& breakpoints, double max_width);

}  // namespace vswalk
