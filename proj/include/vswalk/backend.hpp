#pragma once

#include <optional>
#include <string>
#include <variant>

#include "vswalk/geometry.hpp"
#include "vswalk/polynomial.hpp"

namespace vswalk {

enum class BackendKind { euclidean, sphere, carnot };

// A unit vector for Riemannian and flow steps, or a cylinder covector for Carnot geodesic steps.
using Direction = std::variant<Vec, Covector>;

// Geometric backend with log-density weight h (volume e^h times the reference volume).
class Backend {
 public:
  static Backend euclidean(int n, std::optional<Polynomial> h = std::nullopt);
  // Unit sphere embedded in R^3.
  static Backend sphere(std::optional<Polynomial> h = std::nullopt);
  static Backend carnot(CarnotParams params, std::optional<Polynomial> h = std::nullopt);

  BackendKind kind() const { return kind_; }
  int ambient_dim() const { return dim_; }
  // Dimension k of the horizontal distribution; also the size of flow directions.
  int rank() const;
  const Polynomial& weight() const { return h_; }
  bool weight_is_constant() const { return h_.is_constant(); }
  const CarnotParams& params() const;
  double time_step(double eps) const { return eps * eps / (2.0 * rank()); }
  std::string name() const;

  void check_point(const Vec& q) const;
  Backend with_weight(Polynomial h) const;

 private:
  Backend(BackendKind kind, int dim, Polynomial h, std::optional<CarnotParams> params);

  BackendKind kind_;
  int dim_;
  Polynomial h_;
  std::optional<CarnotParams> params_;
};

Vec backend_exp(const Backend& b, const Vec& q, const Direction& dir, double t);
double backend_jacobian(const Backend& b, const Vec& q, const Direction& dir, double t);

// Endpoint of the time-t flow of the frame combination sum u_i X_i started at q.
Vec flow_endpoint(const Backend& b, const Vec& q, const Vec& u, double t);

}  // namespace vswalk
