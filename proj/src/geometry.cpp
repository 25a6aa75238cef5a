#include "vswalk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vswalk/errors.hpp"

namespace vswalk {

namespace {

// Below this |argument| the cancelling expressions switch to their Taylor series.
constexpr double kSeriesSwitch = 0.1;

// sin(w)/w
double sinc(double w) {
  if (std::abs(w) < kSeriesSwitch) {
    double w2 = w * w;
    return 1.0 - w2 / 6.0 * (1.0 - w2 / 20.0 * (1.0 - w2 / 42.0 * (1.0 - w2 / 72.0)));
  }
  return std::sin(w) / w;
}

// (cos w - 1)/w without cancellation.
double cosc(double w) {
  if (w == 0.0) return 0.0;
  double s = std::sin(0.5 * w);
  return -2.0 * s * s / w;
}

// (w - sin w)/(2 w^2)
double vertical_gain(double w) {
  if (std::abs(w) < kSeriesSwitch) {
    double w2 = w * w;
    return w * (1.0 / 12.0 - w2 / 240.0 + w2 * w2 / 10080.0 - w2 * w2 * w2 / 725760.0 +
                w2 * w2 * w2 * w2 / 79833600.0);
  }
  return (w - std::sin(w)) / (2.0 * w * w);
}

// (w cos w - sin w)/w^3
double kfac(double w) {
  if (std::abs(w) < kSeriesSwitch) {
    double w2 = w * w;
    return -1.0 / 3.0 + w2 / 30.0 - w2 * w2 / 840.0 + w2 * w2 * w2 / 45360.0 -
           w2 * w2 * w2 * w2 / 3991680.0;
  }
  return (w * std::cos(w) - std::sin(w)) / (w * w * w);
}

}  // namespace

CarnotParams::CarnotParams(std::vector<double> alphas) : alphas_(std::move(alphas)) {
  require(!alphas_.empty(), "alphas must be non-empty");
  require(2 * static_cast<int>(alphas_.size()) + 1 <= kMaxDim, "too many alphas");
  for (double a : alphas_) require(std::isfinite(a) && a > 0.0, "alphas must be positive and finite");
  require(std::is_sorted(alphas_.begin(), alphas_.end()), "alphas must be sorted non-decreasing");
}

double CarnotParams::alpha_product() const {
  double p = 1.0;
  for (double a : alphas_) p *= a;
  return p;
}

double CarnotParams::alpha_square_sum() const {
  double s = 0.0;
  for (double a : alphas_) s += a * a;
  return s;
}

bool CarnotParams::equal_alphas() const {
  return std::all_of(alphas_.begin(), alphas_.end(), [&](double a) { return a == alphas_.front(); });
}

Mat CarnotParams::A() const {
  Mat m = Mat::Zero(rank(), rank());
  for (int i = 0; i < d(); ++i) {
    m(2 * i, 2 * i + 1) = -alphas_[i];
    m(2 * i + 1, 2 * i) = alphas_[i];
  }
  return m;
}

Vec CarnotParams::apply_A(const Vec& x) const {
  Vec y(rank());
  for (int i = 0; i < d(); ++i) {
    y[2 * i] = -alphas_[i] * x[2 * i + 1];
    y[2 * i + 1] = alphas_[i] * x[2 * i];
  }
  return y;
}

Vec GroupPoint::to_vec() const {
  Vec q(x.size() + 1);
  q.head(x.size()) = x;
  q[x.size()] = z;
  return q;
}

GroupPoint GroupPoint::from_vec(const Vec& q) {
  return {q.head(q.size() - 1), q[q.size() - 1]};
}

GroupPoint group_mul(const CarnotParams& params, const GroupPoint& p, const GroupPoint& q) {
  return {p.x + q.x, p.z + q.z + 0.5 * p.x.dot(params.apply_A(q.x))};
}

GroupPoint group_inverse(const GroupPoint& p) { return {-p.x, -p.z}; }

ExpCoefficients exp_coefficients(const CarnotParams& params, double t, double pz) {
  ExpCoefficients e{};
  for (int i = 0; i < params.d(); ++i) {
    double al = params.alpha(i);
    double w = t * al * pz;
    e.a[i] = t * sinc(w);
    e.b[i] = t * cosc(w);
    e.v[i] = t * t * vertical_gain(w) * al;
  }
  return e;
}

GroupPoint apply_exp_coefficients(const CarnotParams& params, const ExpCoefficients& e, const Vec& px) {
  GroupPoint out{Vec(params.rank()), 0.0};
  for (int i = 0; i < params.d(); ++i) {
    double p0 = px[2 * i], p1 = px[2 * i + 1];
    // J p = (-p1, p0)
    out.x[2 * i] = e.a[i] * p0 - e.b[i] * p1;
    out.x[2 * i + 1] = e.a[i] * p1 + e.b[i] * p0;
    out.z += e.v[i] * (p0 * p0 + p1 * p1);
  }
  return out;
}

GroupPoint carnot_exp(const CarnotParams& params, double t, const Covector& cov) {
  require(std::isfinite(t) && t >= 0.0, "carnot_exp: t must be finite and >= 0");
  require(cov.px.size() == params.rank(), "carnot_exp: covector size mismatch");
  require(cov.px.allFinite() && std::isfinite(cov.pz), "carnot_exp: non-finite covector");
  return apply_exp_coefficients(params, exp_coefficients(params, t, cov.pz), cov.px);
}

double g_fun(const CarnotParams& params, int i, double y) {
  require(i >= 0 && i < params.d(), "g_fun: block index out of range");
  const double u = 0.5 * y;
  double r = 1.0;
  for (int j = 0; j < params.d(); ++j) {
    double al = params.alpha(j);
    double s = al * sinc(al * u);  // sin(al u)/u
    if (j == i) {
      r *= s * al * al * al * kfac(al * u);
    } else {
      r *= s * s;
    }
  }
  return r;
}

double jac_det(const CarnotParams& params, double t, const Covector& cov) {
  require(t > 0.0, "jac_det: t must be positive");
  double sum = 0.0;
  for (int i = 0; i < params.d(); ++i) sum += g_fun(params, i, t * cov.pz) * cov.block_norm2(i);
  double al = params.alpha_product();
  return std::pow(t, 2 * params.d() + 3) / (4.0 * al * al) * sum;
}

double cut_time(const CarnotParams& params, const Covector& cov) {
  if (cov.pz == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * M_PI / (params.alpha_max() * std::abs(cov.pz));
}

namespace {

struct OdeState {
  Vec x, px;
  double z = 0.0;
};

OdeState ode_rhs(const CarnotParams& params, double pz, const OdeState& s) {
  Vec h = s.px - 0.5 * pz * params.apply_A(s.x);
  OdeState d;
  d.x = h;
  d.z = -0.5 * h.dot(params.apply_A(s.x));
  d.px = -0.5 * pz * params.apply_A(h);
  return d;
}

OdeState axpy(const OdeState& s, double k, const OdeState& d) {
  return {s.x + k * d.x, s.px + k * d.px, s.z + k * d.z};
}

}  // namespace

HamiltonState hamilton_flow(const CarnotParams& params, double t, const Covector& cov, int steps) {
  require(steps >= 100, "hamilton_ode: steps must be >= 100");
  require(cov.px.size() == params.rank(), "hamilton_ode: covector size mismatch");
  OdeState s{Vec::Zero(params.rank()), cov.px, 0.0};
  const double dt = t / steps;
  for (int k = 0; k < steps; ++k) {
    OdeState k1 = ode_rhs(params, cov.pz, s);
    OdeState k2 = ode_rhs(params, cov.pz, axpy(s, 0.5 * dt, k1));
    OdeState k3 = ode_rhs(params, cov.pz, axpy(s, 0.5 * dt, k2));
    OdeState k4 = ode_rhs(params, cov.pz, axpy(s, dt, k3));
    s.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    s.px += dt / 6.0 * (k1.px + 2.0 * k2.px + 2.0 * k3.px + k4.px);
    s.z += dt / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
  }
  HamiltonState out;
  out.point = {s.x, s.z};
  out.momentum = {s.px, cov.pz};
  out.velocity = s.px - 0.5 * cov.pz * params.apply_A(s.x);
  return out;
}

GroupPoint hamilton_ode(const CarnotParams& params, double t, const Covector& cov, int steps) {
  return hamilton_flow(params, t, cov, steps).point;
}

}  // namespace vswalk
