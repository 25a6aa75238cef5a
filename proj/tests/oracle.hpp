#pragma once

// Independent brute-force references used only by tests.

#include <algorithm>
#include <cmath>
#include <vector>

#include "vswalk/geometry.hpp"

namespace oracle {

// Composite Simpson with n (even) intervals.
template <class F>
double simpson(F&& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

template <class F>
double trapezoid(F&& f, double a, double b, long n) {
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (long k = 1; k < n; ++k) s += f(a + k * h);
  return s * h;
}

// k-th positive root of tan u = u, by bisection on sin u - u cos u inside (k pi, k pi + pi/2).
inline double tan_root(int k) {
  double a = k * M_PI + 1e-9, b = k * M_PI + M_PI / 2 - 1e-12;
  auto f = [](double u) { return std::sin(u) - u * std::cos(u); };
  double fa = f(a);
  for (int it = 0; it < 200; ++it) {
    double m = 0.5 * (a + b), fm = f(m);
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// g_i evaluated in long double straight from its product form.
inline double g(const vswalk::CarnotParams& p, int i, double y) {
  long double u = 0.5L * y, r = 1.0L;
  for (int j = 0; j < p.d(); ++j) {
    long double al = p.alpha(j), w = al * u;
    long double s = std::fabs(w) < 1e-6L ? al * (1 - w * w / 6) : std::sin(w) / u;
    long double k = std::fabs(w) < 1e-4L ? -1.0L / 3 + w * w / 30 : (w * std::cos(w) - std::sin(w)) / (w * w * w);
    r *= (j == i) ? s * al * al * al * k : s * s;
  }
  return static_cast<double>(r);
}

// Zeros of g_i on (0, y_max]: sin(alpha_j y / 2) = 0 for any j, and tan(alpha_i y/2) = alpha_i y/2.
inline std::vector<double> g_zeros(const vswalk::CarnotParams& p, int i, double y_max) {
  std::vector<double> z;
  for (int j = 0; j < p.d(); ++j)
    for (int m = 1; 2 * M_PI * m / p.alpha(j) <= y_max; ++m) z.push_back(2 * M_PI * m / p.alpha(j));
  for (int k = 1;; ++k) {
    double y = 2 * tan_root(k) / p.alpha(i);
    if (y > y_max) break;
    z.push_back(y);
  }
  std::sort(z.begin(), z.end());
  return z;
}

// Simpson integral of f over [0, y_max] split at the given points, n intervals per piece.
template <class F>
double piecewise_simpson(F&& f, std::vector<double> pts, double y_max, int n) {
  pts.insert(pts.begin(), 0.0);
  pts.push_back(y_max);
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    if (pts[k + 1] > pts[k]) s += simpson(f, pts[k], pts[k + 1], n);
  return s;
}

}  // namespace oracle
