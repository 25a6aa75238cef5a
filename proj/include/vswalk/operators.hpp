#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vswalk/backend.hpp"
#include "vswalk/constants.hpp"
#include "vswalk/polynomial.hpp"

namespace vswalk {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

// Integral of x^a against the normalized uniform measure on S^{n-1}, n = a.size(); exact.
Rational sphere_moment(const std::vector<int>& a);
// Same through log-Gamma values, for cross-checking.
double sphere_moment_gamma(const std::vector<int>& a);

// Average of (x^T Q x)(x^T R x) over S^{n-1}; Q and R must be symmetric and commute.
double quadform_product_integral(const Mat& Q, const Mat& R);

// Frame calculus at a point for a backend with a global orthonormal frame.
struct FrameData {
  std::vector<double> X_phi;      // X_i phi
  std::vector<double> XX_phi;     // X_i X_i phi
  std::vector<double> div_omega;  // div_omega(X_i) with omega = e^h times the reference volume
  std::vector<double> X_h;        // X_i h
};
FrameData apply_frame(const Backend& b, const Polynomial& phi, const Vec& q);

// Coefficients of the frame field X_i in ambient coordinates, and their Jacobian.
Vec frame_vector(const Backend& b, int i, const Vec& q);
Mat frame_jacobian(const Backend& b, int i, const Vec& q);

// sum_i X_i^2 phi + div_omega(X_i) X_i phi, for omega = e^h times the reference volume.
double sub_laplacian(const Backend& b, const Polynomial& h, const Polynomial& phi, const Vec& q);

enum class GeneratorVariant { riem_geodesic, heisenberg_geodesic, carnot_geodesic, carnot_alt, flow_riem, flow_contact };

GeneratorVariant parse_variant(const std::string& s);
std::string to_string(GeneratorVariant v);

struct GeneratorSpec {
  GeneratorVariant variant = GeneratorVariant::riem_geodesic;
  Backend backend = Backend::euclidean(1);
  double c = 0.5;
  std::optional<SigmaResult> sigma;

  void validate() const;
  // Per-frame-field diffusion scale (sigma of the field's block, or 1).
  double field_scale(int j) const;
};

// Right-hand side of the limit theorem for the variant, evaluated exactly on phi at q.
double limit_generator(const GeneratorSpec& spec, const Polynomial& phi, const Vec& q);

// div_omega(grad' phi) + (2c - 1) grad'(h) phi with grad' built from X'_i = sqrt(sigma_i) X_i,
// computed as the divergence of an explicit vector field.
double primed_form(const GeneratorSpec& spec, const Polynomial& phi, const Vec& q);

struct PrimedFrame {
  std::vector<double> block_scale;  // sqrt(sigma_i)

  // sum_i sigma_i (<l, X_{2i-1}>^2 + <l, X_{2i}>^2) at q.
  double symbol(const CarnotParams& params, const Vec& q, const Covector& l) const;
};

PrimedFrame primed_metric(const CarnotParams& params, const SigmaResult& sigma);
PrimedFrame primed_metric(const CarnotParams& params, const std::vector<double>& sigma);

// 2H(l) = sum_j <l, X_j>^2 at q.
double hamiltonian_symbol(const CarnotParams& params, const Vec& q, const Covector& l);

}  // namespace vswalk
