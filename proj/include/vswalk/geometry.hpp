#pragma once

#include <vector>

#include "vswalk/types.hpp"

namespace vswalk {

// Contact Carnot group R^{2d} x R with A = blockdiag(alpha_i J), J = [[0,-1],[1,0]].
class CarnotParams {
 public:
  explicit CarnotParams(std::vector<double> alphas);
  static CarnotParams heisenberg(int d = 1) { return CarnotParams(std::vector<double>(d, 1.0)); }

  int d() const { return static_cast<int>(alphas_.size()); }
  int rank() const { return 2 * d(); }
  int dim() const { return 2 * d() + 1; }
  const std::vector<double>& alphas() const { return alphas_; }
  double alpha(int i) const { return alphas_[i]; }
  double alpha_max() const { return alphas_.back(); }
  double alpha_product() const;
  double alpha_square_sum() const;
  bool equal_alphas() const;
  // Popp volume as a multiple of Lebesgue measure.
  double popp_constant() const { return 1.0 / (2.0 * alpha_square_sum()); }
  Mat A() const;
  // (A x) restricted to the horizontal part.
  Vec apply_A(const Vec& x) const;

  bool operator==(const CarnotParams& o) const { return alphas_ == o.alphas_; }

 private:
  std::vector<double> alphas_;
};

struct GroupPoint {
  Vec x;
  double z = 0.0;

  Vec to_vec() const;
  static GroupPoint from_vec(const Vec& q);
};

struct Covector {
  Vec px;
  double pz = 0.0;

  // Squared norm of the i-th 2-block of px.
  double block_norm2(int i) const { return px[2 * i] * px[2 * i] + px[2 * i + 1] * px[2 * i + 1]; }
};

GroupPoint group_mul(const CarnotParams& params, const GroupPoint& p, const GroupPoint& q);
GroupPoint group_inverse(const GroupPoint& p);

// Per-block data of exp_0(t; px, pz): x^i = a_i p^i + b_i J p^i, z = sum_i v_i |p^i|^2.
struct ExpCoefficients {
  double a[kMaxDim / 2];
  double b[kMaxDim / 2];
  double v[kMaxDim / 2];
};
ExpCoefficients exp_coefficients(const CarnotParams& params, double t, double pz);
GroupPoint apply_exp_coefficients(const CarnotParams& params, const ExpCoefficients& e, const Vec& px);

GroupPoint carnot_exp(const CarnotParams& params, double t, const Covector& cov);

// i is 0-based.
double g_fun(const CarnotParams& params, int i, double y);

// Sign follows the closed form t^{2d+3}/(4 alpha^2) sum_i g_i(t pz)|p^i|^2, which is minus the
// determinant of d(x,z)/d(px,pz) in the coordinate order (px, pz) -> (x, z).
double jac_det(const CarnotParams& params, double t, const Covector& cov);

// 2 pi / (alpha_d |pz|); +inf when pz = 0.
double cut_time(const CarnotParams& params, const Covector& cov);

struct HamiltonState {
  GroupPoint point;
  Covector momentum;
  Vec velocity;  // horizontal velocity h = px - pz A x / 2
};

// RK4 integration of Hamilton's equations from the origin; a test oracle.
HamiltonState hamilton_flow(const CarnotParams& params, double t, const Covector& cov, int steps);
GroupPoint hamilton_ode(const CarnotParams& params, double t, const Covector& cov, int steps);

}  // namespace vswalk
