#include "vswalk/operators.hpp"

#include <cmath>
#include <numeric>

#include "vswalk/errors.hpp"

namespace vswalk {

namespace {

using i128 = __int128;

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

void reduce(i128& num, i128& den) {
  i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

}  // namespace

Rational sphere_moment(const std::vector<int>& a) {
  require(!a.empty(), "sphere_moment: need at least one exponent");
  int total = 0;
  for (int x : a) {
    require(x >= 0, "sphere_moment: exponents must be non-negative");
    if (x % 2 == 1) return {0, 1};
    total += x;
  }
  const int n = static_cast<int>(a.size());
  i128 num = 1, den = 1;
  for (int x : a)
    for (int k = x - 1; k > 1; k -= 2) {
      num *= k;
      reduce(num, den);
    }
  for (int k = 0; k < total / 2; ++k) {
    den *= n + 2 * k;
    reduce(num, den);
  }
  const i128 lim = static_cast<i128>(INT64_MAX);
  if (num > lim || den > lim) throw NumericalError("sphere_moment: exponents too large for exact arithmetic");
  return {static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

double sphere_moment_gamma(const std::vector<int>& a) {
  const int n = static_cast<int>(a.size());
  double sum_b = 0.0, log_num = 0.0;
  for (int x : a) {
    if (x % 2 == 1) return 0.0;
    double b = 0.5 * (x + 1);
    sum_b += b;
    log_num += std::lgamma(b);
  }
  return std::exp(std::lgamma(0.5 * n) + log_num - 0.5 * n * std::log(M_PI) - std::lgamma(sum_b));
}

double quadform_product_integral(const Mat& Q, const Mat& R) {
  const auto n = Q.rows();
  require(Q.cols() == n && R.rows() == n && R.cols() == n, "quadform_product_integral: shape mismatch");
  require((Q - Q.transpose()).norm() <= 1e-12 * (1.0 + Q.norm()), "quadform_product_integral: Q not symmetric");
  require((R - R.transpose()).norm() <= 1e-12 * (1.0 + R.norm()), "quadform_product_integral: R not symmetric");
  require((Q * R - R * Q).norm() < 1e-10, "quadform_product_integral: Q and R must commute");
  return (2.0 * (Q * R).trace() + Q.trace() * R.trace()) / (double(n) * (n + 2.0));
}

Vec frame_vector(const Backend& b, int i, const Vec& q) {
  require(i >= 0 && i < b.rank(), "frame index out of range");
  switch (b.kind()) {
    case BackendKind::euclidean: {
      Vec v = Vec::Zero(b.ambient_dim());
      v[i] = 1.0;
      return v;
    }
    case BackendKind::carnot: {
      const auto& p = b.params();
      const int k = p.rank();
      Vec v = Vec::Zero(k + 1);
      v[i] = 1.0;
      v[k] = -0.5 * p.apply_A(q.head(k))[i];
      return v;
    }
    case BackendKind::sphere: break;
  }
  throw ValidationError("the sphere backend has no global orthonormal frame");
}

Mat frame_jacobian(const Backend& b, int i, const Vec& q) {
  (void)q;
  require(i >= 0 && i < b.rank(), "frame index out of range");
  const int n = b.ambient_dim();
  Mat jac = Mat::Zero(n, n);
  if (b.kind() == BackendKind::carnot) {
    const Mat A = b.params().A();
    for (int k = 0; k < n - 1; ++k) jac(n - 1, k) = -0.5 * A(i, k);
  } else if (b.kind() == BackendKind::sphere) {
    throw ValidationError("the sphere backend has no global orthonormal frame");
  }
  return jac;
}

FrameData apply_frame(const Backend& b, const Polynomial& phi, const Vec& q) {
  b.check_point(q);
  require(phi.dim() == b.ambient_dim(), "test function dimension does not match backend");
  const Vec grad = phi.gradient(q);
  const Mat hess = phi.hessian(q);
  const Vec grad_h = b.weight().gradient(q);
  FrameData fd;
  for (int i = 0; i < b.rank(); ++i) {
    const Vec c = frame_vector(b, i, q);
    const Mat jac = frame_jacobian(b, i, q);
    fd.X_phi.push_back(c.dot(grad));
    // X(X phi) = c^T H c + (Dc c) . grad
    fd.XX_phi.push_back(c.dot(hess * c) + (jac * c).dot(grad));
    const double xh = c.dot(grad_h);
    fd.X_h.push_back(xh);
    fd.div_omega.push_back(jac.trace() + xh);
  }
  return fd;
}

double sub_laplacian(const Backend& b, const Polynomial& h, const Polynomial& phi, const Vec& q) {
  FrameData fd = apply_frame(b.with_weight(h), phi, q);
  double s = 0.0;
  for (std::size_t i = 0; i < fd.X_phi.size(); ++i) s += fd.XX_phi[i] + fd.div_omega[i] * fd.X_phi[i];
  return s;
}

GeneratorVariant parse_variant(const std::string& s) {
  if (s == "riem_geodesic") return GeneratorVariant::riem_geodesic;
  if (s == "heisenberg_geodesic") return GeneratorVariant::heisenberg_geodesic;
  if (s == "carnot_geodesic") return GeneratorVariant::carnot_geodesic;
  if (s == "carnot_alt") return GeneratorVariant::carnot_alt;
  if (s == "flow_riem") return GeneratorVariant::flow_riem;
  if (s == "flow_contact") return GeneratorVariant::flow_contact;
  throw ValidationError("unknown generator variant '" + s + "'");
}

std::string to_string(GeneratorVariant v) {
  switch (v) {
    case GeneratorVariant::riem_geodesic: return "riem_geodesic";
    case GeneratorVariant::heisenberg_geodesic: return "heisenberg_geodesic";
    case GeneratorVariant::carnot_geodesic: return "carnot_geodesic";
    case GeneratorVariant::carnot_alt: return "carnot_alt";
    case GeneratorVariant::flow_riem: return "flow_riem";
    case GeneratorVariant::flow_contact: return "flow_contact";
  }
  return "?";
}

void GeneratorSpec::validate() const {
  require(std::isfinite(c) && c >= 0.0 && c <= 1.0, "c must lie in [0, 1]");
  const BackendKind k = backend.kind();
  switch (variant) {
    case GeneratorVariant::riem_geodesic:
      require(k != BackendKind::carnot, "riem_geodesic needs a riemannian backend");
      return;
    case GeneratorVariant::flow_riem:
      require(k == BackendKind::euclidean, "flow_riem needs the euclidean backend");
      return;
    case GeneratorVariant::flow_contact:
      require(k == BackendKind::carnot, "flow_contact needs a carnot backend");
      return;
    case GeneratorVariant::heisenberg_geodesic:
    case GeneratorVariant::carnot_geodesic:
    case GeneratorVariant::carnot_alt: break;
  }
  require(k == BackendKind::carnot, "carnot variants need a carnot backend");
  const auto& p = backend.params();
  if (variant == GeneratorVariant::heisenberg_geodesic)
    require(p.equal_alphas(), "heisenberg_geodesic needs equal alphas");
  if (!sigma) throw ValidationError("carnot variants need sigma coefficients");
  require(static_cast<int>(sigma->values.size()) == p.d(), "sigma size does not match the group");
  if (variant == GeneratorVariant::carnot_alt) {
    require(sigma->construction == Construction::minimizing, "carnot_alt needs minimizing-construction sigma");
  } else {
    require(sigma->construction != Construction::minimizing, "use carnot_alt for the minimizing construction");
  }
  require(std::abs(sigma->c - c) <= 1e-12, "sigma was computed for a different c");
}

double GeneratorSpec::field_scale(int j) const {
  switch (variant) {
    case GeneratorVariant::heisenberg_geodesic:
    case GeneratorVariant::carnot_geodesic:
    case GeneratorVariant::carnot_alt: return sigma->values.at(j / 2);
    default: return 1.0;
  }
}

namespace {

// Laplace-Beltrami and gradient pairing on the unit sphere through the ambient extension.
double sphere_generator(const GeneratorSpec& spec, const Polynomial& phi, const Vec& q) {
  const Vec g = phi.gradient(q);
  const Mat H = phi.hessian(q);
  const double lap = H.trace() - q.dot(H * q.cast<double>()) - 2.0 * q.dot(g);
  const Vec gh = spec.backend.weight().gradient(q);
  const Vec tg = g - q.dot(g) * q;
  const Vec th = gh - q.dot(gh) * q;
  return lap + 2.0 * spec.c * th.dot(tg);
}

}  // namespace

double limit_generator(const GeneratorSpec& spec, const Polynomial& phi, const Vec& q) {
  spec.validate();
  const Backend& b = spec.backend;
  b.check_point(q);
  require(phi.dim() == b.ambient_dim(), "test function dimension does not match backend");
  if (b.kind() == BackendKind::sphere) return sphere_generator(spec, phi, q);
  const FrameData fd = apply_frame(b, phi, q);
  const double c = spec.c;
  double out = 0.0;
  switch (spec.variant) {
    case GeneratorVariant::riem_geodesic:
      // Delta_omega + (2c - 1) grad h
      for (int i = 0; i < b.rank(); ++i)
        out += fd.XX_phi[i] + fd.div_omega[i] * fd.X_phi[i] + (2.0 * c - 1.0) * fd.X_h[i] * fd.X_phi[i];
      return out;
    case GeneratorVariant::heisenberg_geodesic:
    case GeneratorVariant::carnot_geodesic:
    case GeneratorVariant::carnot_alt:
      for (int i = 0; i < b.rank(); ++i)
        out += spec.field_scale(i) * (fd.XX_phi[i] + 2.0 * c * fd.X_h[i] * fd.X_phi[i]);
      return out;
    case GeneratorVariant::flow_riem:
    case GeneratorVariant::flow_contact:
      // Delta_omega + c grad h + (c - 1) sum div_omega(X_i) X_i
      for (int i = 0; i < b.rank(); ++i)
        out += fd.XX_phi[i] + fd.div_omega[i] * fd.X_phi[i] + c * fd.X_h[i] * fd.X_phi[i] +
               (c - 1.0) * fd.div_omega[i] * fd.X_phi[i];
      return out;
  }
  return out;
}

double primed_form(const GeneratorSpec& spec, const Polynomial& phi, const Vec& q) {
  spec.validate();
  const Backend& b = spec.backend;
  require(b.kind() != BackendKind::sphere, "primed_form needs a global frame");
  b.check_point(q);
  const int n = b.ambient_dim();
  const Eigen::VectorXd grad = phi.gradient(q);
  const Mat H = phi.hessian(q);
  const Eigen::VectorXd grad_h = b.weight().gradient(q);
  // V = sum_j s_j (X_j phi) X_j; div_omega V = sum_k d_k V_k + V . grad h.
  double div = 0.0;
  Eigen::VectorXd V = Eigen::VectorXd::Zero(n);
  double grad_prime_h_phi = 0.0;
  for (int j = 0; j < b.rank(); ++j) {
    const double s = spec.field_scale(j);
    const Eigen::VectorXd cj = frame_vector(b, j, q);
    const Mat Dj = frame_jacobian(b, j, q);
    const double xphi = cj.dot(grad);
    const Eigen::VectorXd grad_xphi = H * cj + Dj.transpose() * grad;
    div += s * (grad_xphi.dot(cj) + xphi * Dj.trace());
    V += s * xphi * cj;
    grad_prime_h_phi += s * cj.dot(grad_h) * xphi;
  }
  return div + V.dot(grad_h) + (2.0 * spec.c - 1.0) * grad_prime_h_phi;
}

PrimedFrame primed_metric(const CarnotParams& params, const std::vector<double>& sigma) {
  require(static_cast<int>(sigma.size()) == params.d(), "primed_metric: sigma size mismatch");
  PrimedFrame f;
  for (double s : sigma) {
    require(std::isfinite(s) && s > 0.0, "primed_metric: sigma must be positive");
    f.block_scale.push_back(std::sqrt(s));
  }
  return f;
}

PrimedFrame primed_metric(const CarnotParams& params, const SigmaResult& sigma) {
  return primed_metric(params, sigma.values);
}

double PrimedFrame::symbol(const CarnotParams& params, const Vec& q, const Covector& l) const {
  const Vec ax = params.apply_A(q.head(params.rank()));
  double s = 0.0;
  for (int j = 0; j < params.rank(); ++j) {
    const double pair = l.px[j] - 0.5 * ax[j] * l.pz;
    const double sc = block_scale.at(j / 2);
    s += sc * sc * pair * pair;
  }
  return s;
}

double hamiltonian_symbol(const CarnotParams& params, const Vec& q, const Covector& l) {
  PrimedFrame unit{std::vector<double>(params.d(), 1.0)};
  return unit.symbol(params, q, l);
}

}  // namespace vswalk
