#pragma once

#include <string>
#include <vector>

#include "vswalk/geometry.hpp"
#include "vswalk/parallel.hpp"

namespace vswalk {

enum class Construction { full, minimizing, signed_measure };

Construction parse_construction(const std::string& s);
std::string to_string(Construction c);

// Positive roots of tan u = u up to u_max, increasing.
std::vector<double> tan_roots(double u_max);

// Sign changes of g_i on (0, y_max]: the only points where |g_i| fails to be smooth.
std::vector<double> g_kinks(const CarnotParams& params, int i, double y_max);
// Union over all blocks, sorted.
std::vector<double> g_kinks_all(const CarnotParams& params, double y_max);

// Bound on the one-sided tail integral of |g_i| over [y, inf).
double g_tail_bound(const CarnotParams& params, int i, double y);

// Whole-line integrals of g_i, truncated where the two-sided tail bound of every block is below 1e-10.
struct GIntegrals {
  std::vector<double> abs_mass;     // int_R |g_i|
  std::vector<double> signed_mass;  // int_R g_i
  double y_max = 0.0;               // truncation point
  double tail_bound = 0.0;          // bound on the neglected mass per block
  double route_gap = 0.0;           // max disagreement between the two quadrature routes
};

// Cached per parameter set; thread-safe.
const GIntegrals& g_integrals(const CarnotParams& params);

// Integrals of |g_i| and g_i over |y| <= w (Gauss-Legendre route).
struct GWindow {
  std::vector<double> abs_mass;
  std::vector<double> signed_mass;
};
GWindow g_window_integrals(const CarnotParams& params, double w);

struct SigmaResult {
  Construction construction = Construction::full;
  double c = 0.0;
  std::vector<double> values;
  double quad_error_estimate = 0.0;
};

// Limit coefficients for c in (0, 1]. Two independent quadrature routes must agree to 1e-8.
SigmaResult sigma_coeffs(const CarnotParams& params, double c, Construction construction);

std::vector<SigmaResult> sigma_curve(const CarnotParams& params, const std::vector<double>& cs,
                                     Construction construction, Execution ex = Execution::parallel);

// Closed-form c -> 0 limit of the minimizing construction.
std::vector<double> sigma_alt_zero(const CarnotParams& params);

}  // namespace vswalk
