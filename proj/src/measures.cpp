#include "vswalk/measures.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <limits>

#include "vswalk/cylinder.hpp"
#include "vswalk/errors.hpp"

namespace vswalk {

namespace {

// Mass of exp(kappa <a_hat, v>) under the normalized uniform measure on S^{n-1}.
double exp_linear_sphere_mass(int n, double kappa) {
  if (kappa == 0.0) return 1.0;
  if (n == 1) return std::cosh(kappa);
  const double nu = 0.5 * n - 1.0;
  return std::tgamma(0.5 * n) * std::pow(0.5 * kappa, -nu) * boost::math::cyl_bessel_i(nu, kappa);
}

bool weight_is_linear(const Polynomial& h) { return h.degree() <= 1; }

}  // namespace

StepMode parse_step_mode(const std::string& s) {
  if (s == "full") return StepMode::full;
  if (s == "minimizing") return StepMode::minimizing;
  if (s == "signed") return StepMode::signed_measure;
  if (s == "flow") return StepMode::flow;
  throw ValidationError("unknown mode '" + s + "' (expected full, minimizing, signed or flow)");
}

std::string to_string(StepMode m) {
  switch (m) {
    case StepMode::full: return "full";
    case StepMode::minimizing: return "minimizing";
    case StepMode::signed_measure: return "signed";
    case StepMode::flow: return "flow";
  }
  return "?";
}

Construction construction_of(StepMode m) {
  switch (m) {
    case StepMode::full: return Construction::full;
    case StepMode::minimizing: return Construction::minimizing;
    case StepMode::signed_measure: return Construction::signed_measure;
    case StepMode::flow: break;
  }
  throw ValidationError("flow mode has no geodesic construction");
}

std::pair<Vec, Vec> sphere_tangent_basis(const Vec& q) {
  Vec seed = Vec::Zero(3);
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(q[i]) < std::abs(q[k])) k = i;
  seed[k] = 1.0;
  Vec e1 = seed - seed.dot(q) * q;
  e1.normalize();
  Vec e2(3);
  e2 << q[1] * e1[2] - q[2] * e1[1], q[2] * e1[0] - q[0] * e1[2], q[0] * e1[1] - q[1] * e1[0];
  return {e1, e2};
}

StepDensity::StepDensity(Backend b, Vec q, double c, double eps, StepMode mode)
    : backend_(std::move(b)), q_(std::move(q)), c_(c), eps_(eps), mode_(mode) {
  h_q_ = backend_.weight().value(q_);
}

double StepDensity::pz_bound() const {
  if (mode_ == StepMode::minimizing) return 2.0 * M_PI / (backend_.params().alpha_max() * eps_);
  return std::numeric_limits<double>::infinity();
}

bool StepDensity::in_support(const Direction& dir) const {
  if (mode_ != StepMode::minimizing) return true;
  const Covector* cov = std::get_if<Covector>(&dir);
  require(cov != nullptr, "carnot geodesic densities take covectors");
  return std::abs(cov->pz) <= pz_bound();
}

double StepDensity::unnormalized(const Direction& dir) const {
  const Polynomial& h = backend_.weight();
  const double s = scale();
  const bool flat_weight = backend_.weight_is_constant();
  if (mode_ == StepMode::flow) {
    const Vec* u = std::get_if<Vec>(&dir);
    require(u && u->size() == backend_.rank(), "flow densities take unit vectors of the frame dimension");
    require(std::abs(u->norm() - 1.0) < 1e-9, "flow direction must be unit-norm");
    if (flat_weight) return 1.0;
    return std::exp(h.value(flow_endpoint(backend_, q_, *u, s)) - h_q_);
  }
  switch (backend_.kind()) {
    case BackendKind::euclidean:
    case BackendKind::sphere: {
      if (flat_weight || s == 0.0) {
        backend_exp(backend_, q_, dir, 0.0);  // validates the direction
        return 1.0;
      }
      return std::exp(h.value(backend_exp(backend_, q_, dir, s)) - h_q_);
    }
    case BackendKind::carnot: {
      const Covector* cov = std::get_if<Covector>(&dir);
      require(cov != nullptr, "carnot geodesic densities take covectors");
      require(std::abs(cov->px.norm() - 1.0) < 1e-9, "covector must lie on the unit cylinder");
      if (!in_support(dir)) return 0.0;
      const auto& p = backend_.params();
      double kern = 0.0;
      for (int i = 0; i < p.d(); ++i) {
        double g = g_fun(p, i, s * cov->pz);
        kern += (mode_ == StepMode::signed_measure ? g : std::abs(g)) * cov->block_norm2(i);
      }
      if (flat_weight) return kern;
      return kern * std::exp(h.value(backend_exp(backend_, q_, dir, s)) - h_q_);
    }
  }
  return 0.0;
}

double StepDensity::pz_marginal(double pz) const {
  require(backend_.kind() == BackendKind::carnot && mode_ != StepMode::flow,
          "pz_marginal applies to Carnot geodesic densities");
  require(backend_.weight_is_constant(), "pz_marginal requires a constant weight");
  if (mode_ == StepMode::minimizing && std::abs(pz) > pz_bound()) return 0.0;
  const auto& p = backend_.params();
  double sum = 0.0;
  for (int i = 0; i < p.d(); ++i) {
    double g = g_fun(p, i, scale() * pz);
    sum += mode_ == StepMode::signed_measure ? g : std::abs(g);
  }
  return sum / (p.d() * norm_);
}

StepDensity geodesic_step_density(const Backend& b, const Vec& q, double c, double eps, StepMode mode) {
  b.check_point(q);
  require(std::isfinite(eps) && eps > 0.0, "eps must be positive");
  require(std::isfinite(c) && c >= 0.0 && c <= 1.0, "c must lie in [0, 1]");
  require(mode != StepMode::flow, "use flow_step_density for flow walks");
  StepDensity sd(b, q, c, eps, mode);
  const Polynomial& h = b.weight();
  const double s = c * eps;
  switch (b.kind()) {
    case BackendKind::euclidean: {
      require(mode == StepMode::full, "riemannian backends only support the full construction");
      if (b.weight_is_constant() || s == 0.0) {
        sd.norm_ = 1.0;
      } else if (weight_is_linear(h)) {
        sd.norm_ = exp_linear_sphere_mass(b.ambient_dim(), s * h.gradient(q).norm());
      } else {
        sd.norm_ = converged_sphere_average(b.ambient_dim(), [&](const Vec& v) {
                     return std::exp(h.value(q + s * v) - sd.h_q_);
                   }).first;
      }
      break;
    }
    case BackendKind::sphere: {
      require(mode == StepMode::full, "riemannian backends only support the full construction");
      if (b.weight_is_constant() || s == 0.0) {
        sd.norm_ = 1.0;
      } else {
        auto [e1, e2] = sphere_tangent_basis(q);
        sd.norm_ = converged_sphere_average(2, [&](const Vec& u) {
                     Vec v = u[0] * e1 + u[1] * e2;
                     return std::exp(h.value(std::cos(s) * q + std::sin(s) * v) - sd.h_q_);
                   }).first;
      }
      break;
    }
    case BackendKind::carnot: {
      require(c > 0.0, "carnot geodesic walks need c in (0, 1]");
      const auto& p = b.params();
      double w_max;
      if (mode == StepMode::minimizing) {
        w_max = 2.0 * M_PI * c / p.alpha_max();
        GWindow gw = g_window_integrals(p, w_max);
        for (double v : gw.abs_mass) sd.kernel_total_ += v;
      } else {
        const GIntegrals& gi = g_integrals(p);
        w_max = gi.y_max;
        for (int i = 0; i < p.d(); ++i)
          sd.kernel_total_ += mode == StepMode::signed_measure ? gi.signed_mass[i] : gi.abs_mass[i];
      }
      if (b.weight_is_constant()) {
        sd.norm_ = sd.kernel_total_ / (p.d() * s);
      } else {
        // Cylinder cubature in w = s p_z; dp_z = dw / s.
        CylinderSpec spec{w_max, mode == StepMode::signed_measure, 2.0 * M_PI / p.alpha_max(), 16};
        const GroupPoint q0 = GroupPoint::from_vec(q);
        auto run = [&](int m) {
          SphereRule rule = sphere_rule(p.rank(), m);
          auto f = [&](double w) {
            const ExpCoefficients ce = exp_coefficients(p, s, w / s);
            return [&, ce](const double* px, std::array<double, 1>& out) {
              Vec pxv = Eigen::Map<const Eigen::VectorXd>(px, p.rank());
              GroupPoint e = apply_exp_coefficients(p, ce, pxv);
              out[0] = std::exp(h.value(group_mul(p, q0, e).to_vec()) - sd.h_q_);
            };
          };
          return cylinder_integrate<1>(p, spec, rule, f, Execution::parallel).value[0] / s;
        };
        double a = run(6), bb = run(12);
        if (std::abs(a - bb) > 1e-8 * std::abs(bb))
          throw NumericalError("step density normalization did not converge");
        sd.norm_ = bb;
      }
      break;
    }
  }
  if (!(sd.norm_ != 0.0 && std::isfinite(sd.norm_)))
    throw NumericalError("step density normalization failed");
  return sd;
}

StepDensity flow_step_density(const Backend& b, const Vec& q, double c, double eps) {
  b.check_point(q);
  require(b.kind() != BackendKind::sphere, "flow walks need a global orthonormal frame (euclidean or carnot backend)");
  require(std::isfinite(eps) && eps >= 0.0, "eps must be non-negative");
  require(std::isfinite(c) && c >= 0.0 && c <= 1.0, "c must lie in [0, 1]");
  StepDensity sd(b, q, c, eps, StepMode::flow);
  const Polynomial& h = b.weight();
  const double s = c * eps;
  if (b.weight_is_constant() || s == 0.0) {
    sd.norm_ = 1.0;
  } else if (b.kind() == BackendKind::euclidean && weight_is_linear(h)) {
    sd.norm_ = exp_linear_sphere_mass(b.ambient_dim(), s * h.gradient(q).norm());
  } else {
    sd.norm_ = converged_sphere_average(b.rank(), [&](const Vec& u) {
                 return std::exp(h.value(flow_endpoint(b, q, u, s)) - sd.h_q_);
               }).first;
  }
  return sd;
}

double likelihood_ratio(const StepDensity& density, const Direction& l1, const Direction& l2) {
  const double d1 = density.value(l1);
  if (d1 == 0.0) throw NumericalError("likelihood_ratio: zero density at the reference direction");
  return density.value(l2) / d1;
}

}  // namespace vswalk
