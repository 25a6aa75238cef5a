#include "vswalk/constants.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "vswalk/errors.hpp"
#include "vswalk/quadrature.hpp"

namespace vswalk {

namespace {

constexpr int kGaussOrder = 64;
constexpr double kRouteAgreement = 1e-8;
constexpr double kGTailTarget = 1e-10;
constexpr double kInnerTailTarget = 1e-11;

// Panel width cap in units where the fastest oscillation has period 2 pi / alpha_d.
double max_panel_width(const CarnotParams& p) { return 4.0 * M_PI / p.alpha_max(); }

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

struct RouteSums {
  double gl_abs = 0.0, gl_signed = 0.0;
  double simpson_abs = 0.0, simpson_signed = 0.0;
};

// Integrates f over [0, b] on panels whose interiors avoid the sign changes of f,
// by Gauss-Legendre and by adaptive Simpson. Absolute values are taken per panel.
template <class F>
RouteSums integrate_sign_panels(F&& f, double b, const std::vector<double>& kinks, double max_width, double tol,
                                bool with_simpson) {
  std::vector<double> edges = panel_edges(0.0, b, kinks, max_width);
  const std::size_t np = edges.size() - 1;
  const GaussRule& rule = gauss_legendre(kGaussOrder);
  std::vector<double> gl(np), sp(np, 0.0);
  for (std::size_t k = 0; k < np; ++k) {
    double lo = edges[k], hi = edges[k + 1];
    gl[k] = gauss_panel(f, lo, hi, rule);
    if (with_simpson) sp[k] = adaptive_quad(f, lo, hi, tol * (hi - lo) / b).value;
  }
  RouteSums r;
  std::vector<double> tmp(np);
  for (std::size_t k = 0; k < np; ++k) tmp[k] = std::abs(gl[k]);
  r.gl_abs = pairwise_sum(tmp);
  r.gl_signed = pairwise_sum(gl);
  for (std::size_t k = 0; k < np; ++k) tmp[k] = std::abs(sp[k]);
  r.simpson_abs = pairwise_sum(tmp);
  r.simpson_signed = pairwise_sum(sp);
  return r;
}

double solve_truncation(const std::function<double(double)>& tail, double start, double target) {
  double y = start;
  while (tail(y) > target) y *= 1.25;
  return y;
}

GIntegrals compute_g_integrals(const CarnotParams& params) {
  GIntegrals out;
  double y = 4.0 * M_PI;
  for (int i = 0; i < params.d(); ++i)
    y = std::max(y, solve_truncation([&](double t) { return 2.0 * g_tail_bound(params, i, t); }, 4.0 * M_PI,
                                     kGTailTarget));
  out.y_max = y;
  for (int i = 0; i < params.d(); ++i) {
    out.tail_bound = std::max(out.tail_bound, 2.0 * g_tail_bound(params, i, y));
    auto f = [&](double t) { return g_fun(params, i, t); };
    RouteSums r = integrate_sign_panels(f, y, g_kinks(params, i, y), max_panel_width(params), 1e-12, true);
    out.abs_mass.push_back(2.0 * r.gl_abs);
    out.signed_mass.push_back(2.0 * r.gl_signed);
    out.route_gap = std::max({out.route_gap, 2.0 * std::abs(r.gl_abs - r.simpson_abs),
                              2.0 * std::abs(r.gl_signed - r.simpson_signed)});
  }
  if (out.route_gap > kRouteAgreement)
    throw NumericalError("g integrals: quadrature routes disagree by " + std::to_string(out.route_gap));
  return out;
}

}  // namespace

Construction parse_construction(const std::string& s) {
  if (s == "full") return Construction::full;
  if (s == "minimizing") return Construction::minimizing;
  if (s == "signed") return Construction::signed_measure;
  throw ValidationError("unknown construction '" + s + "' (expected full, minimizing or signed)");
}

std::string to_string(Construction c) {
  switch (c) {
    case Construction::full: return "full";
    case Construction::minimizing: return "minimizing";
    case Construction::signed_measure: return "signed";
  }
  return "?";
}

std::vector<double> tan_roots(double u_max) {
  std::vector<double> roots;
  for (int k = 1;; ++k) {
    double guess_base = (k + 0.5) * M_PI;
    if (guess_base - M_PI > u_max) break;
    double u = guess_base - 1.0 / guess_base;
    for (int it = 0; it < 50; ++it) {
      double f = u * std::cos(u) - std::sin(u);
      double fp = -u * std::sin(u);
      double du = f / fp;
      u -= du;
      if (std::abs(du) < 1e-15 * u) break;
    }
    if (u > u_max) break;
    roots.push_back(u);
  }
  return roots;
}

std::vector<double> g_kinks(const CarnotParams& params, int i, double y_max) {
  require(i >= 0 && i < params.d(), "g_kinks: block index out of range");
  const double a = params.alpha(i);
  std::vector<double> k;
  for (int m = 1; 2.0 * M_PI * m / a <= y_max; ++m) k.push_back(2.0 * M_PI * m / a);
  for (double u : tan_roots(0.5 * a * y_max)) k.push_back(2.0 * u / a);
  std::sort(k.begin(), k.end());
  return k;
}

std::vector<double> g_kinks_all(const CarnotParams& params, double y_max) {
  std::vector<double> all;
  for (int i = 0; i < params.d(); ++i) {
    auto k = g_kinks(params, i, y_max);
    all.insert(all.end(), k.begin(), k.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

double g_tail_bound(const CarnotParams& params, int i, double y) {
  const int d = params.d();
  const double v = 0.5 * y;
  return 2.0 * (params.alpha(i) / (2.0 * d * std::pow(v, 2 * d)) + 1.0 / ((2.0 * d + 1.0) * std::pow(v, 2 * d + 1)));
}

const GIntegrals& g_integrals(const CarnotParams& params) {
  static std::mutex mu;
  static std::map<std::vector<double>, std::unique_ptr<GIntegrals>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[params.alphas()];
  if (!slot) slot = std::make_unique<GIntegrals>(compute_g_integrals(params));
  return *slot;
}

GWindow g_window_integrals(const CarnotParams& params, double w) {
  require(w > 0.0 && std::isfinite(w), "g_window_integrals: half-width must be positive and finite");
  GWindow out;
  for (int i = 0; i < params.d(); ++i) {
    auto f = [&](double t) { return g_fun(params, i, t); };
    RouteSums r = integrate_sign_panels(f, w, g_kinks(params, i, w), max_panel_width(params), 1e-12, false);
    out.abs_mass.push_back(2.0 * r.gl_abs);
    out.signed_mass.push_back(2.0 * r.gl_signed);
  }
  return out;
}

SigmaResult sigma_coeffs(const CarnotParams& params, double c, Construction construction) {
  require(std::isfinite(c) && c > 0.0 && c <= 1.0, "sigma_coeffs: c must lie in (0, 1]");
  const int d = params.d();
  const bool abs_mode = construction != Construction::signed_measure;

  // Normalization masses per route.
  std::vector<double> norm_gl(d), norm_sp(d);
  double error = 0.0;
  if (construction == Construction::minimizing) {
    const double w = 2.0 * M_PI * c / params.alpha_max();
    for (int l = 0; l < d; ++l) {
      auto f = [&](double t) { return g_fun(params, l, t); };
      RouteSums r = integrate_sign_panels(f, w, g_kinks(params, l, w), max_panel_width(params), 1e-12, true);
      norm_gl[l] = 2.0 * r.gl_abs;
      norm_sp[l] = 2.0 * r.simpson_abs;
    }
  } else {
    const GIntegrals& g = g_integrals(params);
    for (int l = 0; l < d; ++l) {
      norm_gl[l] = abs_mode ? g.abs_mass[l] : g.signed_mass[l];
      // The cached integrals already passed the dual-route check; reuse them with their gap as error.
      norm_sp[l] = norm_gl[l];
    }
    error += g.route_gap + g.tail_bound;
  }

  // Inner integrals I[l][i] = int |g_l(c p)| sinc^2(alpha_i p / 2) dp over the construction's p-range.
  std::vector<std::vector<double>> inner_gl(d, std::vector<double>(d)), inner_sp = inner_gl;
  double tail_total = 0.0;
  for (int l = 0; l < d; ++l) {
    for (int i = 0; i < d; ++i) {
      const double ai = params.alpha(i);
      double p_max;
      if (construction == Construction::minimizing) {
        p_max = 2.0 * M_PI / params.alpha_max();
      } else {
        auto tail = [&](double p) {
          double v = 0.5 * c * p;
          return (2.0 * c / (ai * ai)) *
                 (params.alpha(l) / ((2.0 * d + 2.0) * std::pow(v, 2 * d + 2)) +
                  1.0 / ((2.0 * d + 3.0) * std::pow(v, 2 * d + 3)));
        };
        p_max = solve_truncation(tail, 4.0 * M_PI / c, kInnerTailTarget);
        tail_total += 2.0 * tail(p_max);
      }
      std::vector<double> kinks = g_kinks(params, l, c * p_max);
      for (double& k : kinks) k /= c;
      auto f = [&](double p) {
        double s = sinc(0.5 * ai * p);
        return g_fun(params, l, c * p) * s * s;
      };
      RouteSums r = integrate_sign_panels(f, p_max, kinks, max_panel_width(params), 1e-12, true);
      inner_gl[l][i] = 2.0 * (abs_mode ? r.gl_abs : r.gl_signed);
      inner_sp[l][i] = 2.0 * (abs_mode ? r.simpson_abs : r.simpson_signed);
    }
  }

  auto assemble = [&](const std::vector<double>& norm, const std::vector<std::vector<double>>& inner) {
    double total = 0.0;
    for (double g : norm) total += g;
    if (total == 0.0) throw NumericalError("sigma_coeffs: vanishing normalization");
    std::vector<double> s(d);
    for (int i = 0; i < d; ++i) {
      double acc = 0.0;
      for (int l = 0; l < d; ++l) acc += (l == i ? 2.0 : 1.0) * inner[l][i];
      s[i] = c * d / ((d + 1.0) * total) * acc;
    }
    return s;
  };
  std::vector<double> s_gl = assemble(norm_gl, inner_gl);
  std::vector<double> s_sp = assemble(norm_sp, inner_sp);
  double gap = 0.0;
  for (int i = 0; i < d; ++i) gap = std::max(gap, std::abs(s_gl[i] - s_sp[i]));
  if (gap > kRouteAgreement)
    throw NumericalError("sigma_coeffs: quadrature routes disagree by " + std::to_string(gap));

  double total_norm = 0.0;
  for (double g : norm_gl) total_norm += std::abs(g);
  SigmaResult out;
  out.construction = construction;
  out.c = c;
  out.values = s_gl;
  out.quad_error_estimate = gap + c * d * 3.0 * tail_total / ((d + 1.0) * total_norm) + error;
  return out;
}

std::vector<SigmaResult> sigma_curve(const CarnotParams& params, const std::vector<double>& cs,
                                     Construction construction, Execution ex) {
  if (construction != Construction::minimizing) g_integrals(params);
  std::vector<SigmaResult> out(cs.size());
  for_each_index(cs.size(), ex, [&](std::size_t k) { out[k] = sigma_coeffs(params, cs[k], construction); });
  return out;
}

std::vector<double> sigma_alt_zero(const CarnotParams& params) {
  const int d = params.d();
  const double sq = params.alpha_square_sum();
  std::vector<double> out;
  for (int i = 0; i < d; ++i) {
    const double k = params.alpha(i) / (2.0 * params.alpha_max());
    auto f = [&](double x) {
      double s = sinc(k * x);
      return s * s;
    };
    double integral = 2.0 * adaptive_quad(f, 0.0, 2.0 * M_PI, 1e-14).value;
    out.push_back(d / (4.0 * M_PI * (d + 1.0)) * (1.0 + params.alpha(i) * params.alpha(i) / sq) * integral);
  }
  return out;
}

}  // namespace vswalk
