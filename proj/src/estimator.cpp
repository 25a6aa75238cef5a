#include "vswalk/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vswalk/cylinder.hpp"
#include "vswalk/errors.hpp"
#include "vswalk/sampling.hpp"

namespace vswalk {

namespace {

constexpr long kMcBlock = 4096;
constexpr double kMachEps = std::numeric_limits<double>::epsilon();

// Sphere order that integrates phi(linear-in-u endpoint) times a degree-2 factor exactly.
int exact_order(int degree) { return std::max(2, (degree + 4) / 2 + 1); }

// Ratio of sphere averages of num and den; exact rule when exact_m > 0, else refined until stable.
template <class F>
Estimate sphere_ratio(int n, F&& f, int exact_m) {
  auto eval = [&](int m) {
    SphereRule r = sphere_rule(n, m);
    double num = 0.0, den = 0.0;
    Vec u(n);
    for (std::size_t j = 0; j < r.size(); ++j) {
      for (int k = 0; k < n; ++k) u[k] = r.point(j)[k];
      auto [a, w] = f(u);
      num += r.weights[j] * a * w;
      den += r.weights[j] * w;
    }
    return num / den;
  };
  if (exact_m > 0) {
    double a = eval(exact_m), b = eval(exact_m + 2);
    return {b, std::abs(a - b)};
  }
  double prev = eval(8);
  for (int m = 16; m <= 128; m *= 2) {
    double cur = eval(m);
    if (std::abs(cur - prev) <= 1e-13 * std::max(1.0, std::abs(cur))) return {cur, std::abs(cur - prev)};
    prev = cur;
  }
  throw NumericalError("estimate_Leps: sphere quadrature did not converge");
}

Estimate quadrature_Leps(const Backend& b, const Vec& q, double c, double eps, StepMode mode, const Polynomial& phi,
                         Execution ex) {
  const Polynomial& h = b.weight();
  const bool flat = b.weight_is_constant();
  const double s = c * eps, delta = b.time_step(eps);
  const double phi_q = phi.value(q), h_q = h.value(q);
  Estimate e;
  if (mode == StepMode::flow || b.kind() == BackendKind::euclidean) {
    auto f = [&](const Vec& u) {
      Vec end = mode == StepMode::flow ? flow_endpoint(b, q, u, eps) : Vec(q + eps * u);
      double w = 1.0;
      if (!flat) w = std::exp(h.value(mode == StepMode::flow ? flow_endpoint(b, q, u, s) : Vec(q + s * u)) - h_q);
      return std::pair<double, double>{phi.value(end) - phi_q, w};
    };
    const int deg = b.kind() == BackendKind::carnot ? phi.weighted_degree() : phi.degree();
    e = sphere_ratio(b.rank(), f, flat ? exact_order(deg) : 0);
  } else if (b.kind() == BackendKind::sphere) {
    auto [e1, e2] = sphere_tangent_basis(q);
    auto f = [&](const Vec& u) {
      Vec v = u[0] * e1 + u[1] * e2;
      double w = flat ? 1.0 : std::exp(h.value(std::cos(s) * q + std::sin(s) * v) - h_q);
      return std::pair<double, double>{phi.value(std::cos(eps) * q + std::sin(eps) * v) - phi_q, w};
    };
    e = sphere_ratio(2, f, 0);
  } else {
    require(c > 0.0, "carnot geodesic walks need c in (0, 1]");
    const auto& p = b.params();
    CylinderSpec spec;
    spec.signed_kernel = mode == StepMode::signed_measure;
    spec.w_max = mode == StepMode::minimizing ? 2.0 * M_PI * c / p.alpha_max() : g_integrals(p).y_max;
    spec.max_width = 2.0 * M_PI * c / p.alpha_max();
    spec.gauss_order = 16;
    const int k = p.rank();
    const Vec qx = q.head(k);
    const Vec aqx = p.apply_A(qx);
    auto f = [&](double w) {
      const double pz = w / s;
      const ExpCoefficients ce = exp_coefficients(p, eps, pz);
      const ExpCoefficients cs = exp_coefficients(p, s, pz);
      return [&, ce, cs](const double* px, std::array<double, 2>& out) {
        Vec pv = Eigen::Map<const Eigen::VectorXd>(px, k);
        GroupPoint e = apply_exp_coefficients(p, ce, pv);
        Vec end(k + 1);
        end.head(k) = qx + e.x;
        end[k] = q[k] + e.z - 0.5 * aqx.dot(e.x);
        double wt = 1.0;
        if (!flat) {
          GroupPoint ew = apply_exp_coefficients(p, cs, pv);
          Vec endw(k + 1);
          endw.head(k) = qx + ew.x;
          endw[k] = q[k] + ew.z - 0.5 * aqx.dot(ew.x);
          wt = std::exp(h.value(endw) - h_q);
        }
        out[0] = (phi.value(end) - phi_q) * wt;
        out[1] = wt;
      };
    };
    auto run = [&](int m) { return cylinder_integrate<2>(p, spec, sphere_rule(k, m), f, ex); };
    CylinderResult<2> r;
    double sphere_err = 0.0;
    if (flat) {
      r = run(exact_order(phi.weighted_degree()));
    } else {
      CylinderResult<2> coarse = run(8);
      r = run(12);
      sphere_err = std::abs(coarse.value[0] / coarse.value[1] - r.value[0] / r.value[1]);
    }
    const double ratio = r.value[0] / r.value[1];
    const double tail = mode == StepMode::minimizing ? 0.0 : g_integrals(p).tail_bound;
    e.value = ratio;
    e.error = (r.error[0] + std::abs(ratio) * r.error[1] + tail * std::abs(ratio)) / std::abs(r.value[1]) +
              sphere_err;
  }
  e.value /= delta;
  e.error = e.error / delta + 10.0 * kMachEps * std::abs(phi_q) / delta;
  return e;
}

Estimate monte_carlo_Leps(const Backend& b, const Vec& q, double c, double eps, StepMode mode, const Polynomial& phi,
                          const EstimateOptions& opt) {
  require(opt.samples >= 1000, "Monte Carlo estimates need at least 1000 samples");
  require(mode != StepMode::signed_measure, "the signed construction cannot be sampled");
  DirectionSampler sampler(b, c, eps, mode);
  const double delta = b.time_step(eps), phi_q = phi.value(q);
  const long nb = (opt.samples + kMcBlock - 1) / kMcBlock;
  std::vector<double> sums(nb), sq(nb);
  for_each_index(static_cast<std::size_t>(nb), opt.exec, [&](std::size_t blk) {
    Philox rng(opt.seed, stream_id(StreamDomain::monte_carlo, blk));
    const long lo = static_cast<long>(blk) * kMcBlock;
    const long hi = std::min(opt.samples, lo + kMcBlock);
    double s1 = 0.0, s2 = 0.0;
    for (long k = lo; k < hi; ++k) {
      const double y = (phi.value(sampler.step(rng, q)) - phi_q) / delta;
      s1 += y;
      s2 += y * y;
    }
    sums[blk] = s1;
    sq[blk] = s2;
  });
  const double n = static_cast<double>(opt.samples);
  const double mean = pairwise_sum(sums) / n;
  const double var = std::max(0.0, (pairwise_sum(sq) - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

}  // namespace

Method parse_method(const std::string& s) {
  if (s == "quadrature") return Method::quadrature;
  if (s == "monte_carlo" || s == "mc") return Method::monte_carlo;
  throw ValidationError("unknown method '" + s + "' (expected quadrature or monte_carlo)");
}

std::string to_string(Method m) { return m == Method::quadrature ? "quadrature" : "monte_carlo"; }

Estimate estimate_Leps(const Backend& b, const Vec& q, double c, double eps, StepMode mode, const Polynomial& phi,
                       const EstimateOptions& opt) {
  b.check_point(q);
  require(phi.dim() == b.ambient_dim(), "test function dimension does not match backend");
  require(std::isfinite(eps) && eps > 0.0, "eps must be positive");
  require(std::isfinite(c) && c >= 0.0 && c <= 1.0, "c must lie in [0, 1]");
  if (mode == StepMode::flow) {
    require(b.kind() != BackendKind::sphere, "flow walks need a global orthonormal frame (euclidean or carnot backend)");
  } else if (b.kind() != BackendKind::carnot) {
    require(mode == StepMode::full, "riemannian backends only support the full construction");
  }
  if (opt.method == Method::monte_carlo) return monte_carlo_Leps(b, q, c, eps, mode, phi, opt);
  return quadrature_Leps(b, q, c, eps, mode, phi, opt.exec);
}

StepMode step_mode_for(const GeneratorSpec& spec) {
  switch (spec.variant) {
    case GeneratorVariant::riem_geodesic: return StepMode::full;
    case GeneratorVariant::flow_riem:
    case GeneratorVariant::flow_contact: return StepMode::flow;
    case GeneratorVariant::carnot_alt: return StepMode::minimizing;
    case GeneratorVariant::heisenberg_geodesic:
    case GeneratorVariant::carnot_geodesic:
      return spec.sigma && spec.sigma->construction == Construction::signed_measure ? StepMode::signed_measure
                                                                                     : StepMode::full;
  }
  return StepMode::full;
}

ConvergenceReport convergence_slope(const GeneratorSpec& spec, const Vec& q, const Polynomial& phi,
                                    const std::vector<double>& eps_grid, const EstimateOptions& opt) {
  spec.validate();
  require(eps_grid.size() >= 4, "convergence_slope: need at least four eps values");
  for (std::size_t k = 1; k < eps_grid.size(); ++k)
    require(eps_grid[k] < eps_grid[k - 1], "convergence_slope: eps grid must be strictly decreasing");
  ConvergenceReport rep;
  rep.eps_grid = eps_grid;
  rep.target = limit_generator(spec, phi, q);
  const StepMode mode = step_mode_for(spec);
  const double phi_q = std::abs(phi.value(q));
  std::vector<double> xs, ys;
  for (double eps : eps_grid) {
    Estimate e = estimate_Leps(spec.backend, q, spec.c, eps, mode, phi, opt);
    const double err = std::abs(e.value - rep.target);
    const double delta = spec.backend.time_step(eps);
    const double floor = 10.0 * kMachEps * (std::abs(rep.target) + phi_q / delta) + 2.0 * e.error;
    rep.estimates.push_back(e);
    rep.errors.push_back(err);
    rep.noise_floor.push_back(floor);
    if (err > floor) {
      xs.push_back(std::log(eps));
      ys.push_back(std::log(err));
    }
  }
  rep.points_used = static_cast<int>(xs.size());
  if (xs.size() < 2) {
    rep.below_tolerance = true;
    rep.fitted_slope = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  rep.fitted_slope = sxy / sxx;
  return rep;
}

namespace {

struct Moments {
  double mean = 0.0, stderr_ = 0.0;
};

Moments moments(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = pairwise_sum(v) / n;
  std::vector<double> dev(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) dev[k] = (v[k] - mean) * (v[k] - mean);
  return {mean, std::sqrt(pairwise_sum(dev) / (n - 1.0) / n)};
}

// One Euler-Maruyama step of the diffusion with generator sum_j s_j (X_j^2 + 2c X_j h X_j),
// or Delta_S + 2c grad h on the sphere.
Vec euler_step(const GeneratorSpec& spec, const Vec& x, double dt, Philox& rng) {
  const Backend& b = spec.backend;
  const Vec gh = b.weight().gradient(x);
  const double sq = std::sqrt(dt);
  if (b.kind() == BackendKind::sphere) {
    Vec dw(3);
    for (int k = 0; k < 3; ++k) dw[k] = rng.normal() * sq;
    Vec y = x + std::sqrt(2.0) * (dw - x.dot(dw) * x) - 2.0 * x * dt + 2.0 * spec.c * (gh - x.dot(gh) * x) * dt;
    return y / y.norm();
  }
  Vec y = x;
  for (int j = 0; j < b.rank(); ++j) {
    const Vec cj = frame_vector(b, j, x);
    const double s = spec.field_scale(j);
    y += (std::sqrt(2.0 * s) * rng.normal() * sq + 2.0 * spec.c * s * cj.dot(gh) * dt) * cj;
  }
  return y;
}

}  // namespace

WeakCompare euler_weak_compare(const GeneratorSpec& spec, const Vec& q0, double T, double eps, double dt, long n_paths,
                               const Polynomial& phi, std::uint64_t seed, Execution ex) {
  spec.validate();
  const Backend& b = spec.backend;
  b.check_point(q0);
  require(phi.dim() == b.ambient_dim(), "test function dimension does not match backend");
  require(T > 0.0 && eps > 0.0 && dt > 0.0, "T, eps and dt must be positive");
  require(n_paths >= 2, "need at least two paths");
  const StepMode mode = step_mode_for(spec);
  require(mode != StepMode::signed_measure, "the signed construction cannot be sampled");
  WeakCompare out;
  out.walk_steps = std::max(1L, std::lround(T / b.time_step(eps)));
  out.euler_steps = std::max(1L, std::lround(T / dt));
  if (static_cast<double>(out.walk_steps) * n_paths > kWeakCompareBudget ||
      static_cast<double>(out.euler_steps) * n_paths > kWeakCompareBudget)
    throw ValidationError("euler_weak_compare: simulation budget exceeded");

  WalkConfig cfg{eps, spec.c, mode, out.walk_steps, n_paths, seed};
  std::vector<Vec> ends = simulate_terminal(b, q0, cfg, ex);
  std::vector<double> walk_vals(n_paths), euler_vals(n_paths);
  for (long k = 0; k < n_paths; ++k) walk_vals[k] = phi.value(ends[k]);

  const double h_dt = T / out.euler_steps;
  for_each_index(static_cast<std::size_t>(n_paths), ex, [&](std::size_t k) {
    Philox rng(seed, stream_id(StreamDomain::euler, k));
    Vec x = q0;
    for (long m = 0; m < out.euler_steps; ++m) x = euler_step(spec, x, h_dt, rng);
    euler_vals[k] = phi.value(x);
  });
  Moments a = moments(walk_vals), e = moments(euler_vals);
  out.walk_mean = a.mean;
  out.walk_stderr = a.stderr_;
  out.euler_mean = e.mean;
  out.euler_stderr = e.stderr_;
  out.pooled_stderr = std::sqrt(a.stderr_ * a.stderr_ + e.stderr_ * e.stderr_);
  out.z = out.pooled_stderr > 0.0 ? (out.walk_mean - out.euler_mean) / out.pooled_stderr : 0.0;
  return out;
}

}  // namespace vswalk
