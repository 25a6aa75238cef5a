#include "vswalk/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "vswalk/errors.hpp"
#include "vswalk/quadrature.hpp"

namespace vswalk {

void WalkConfig::validate(const Backend& b) const {
  require(std::isfinite(eps) && eps > 0.0, "eps must be positive");
  require(std::isfinite(c) && c >= 0.0 && c <= 1.0, "c must lie in [0, 1]");
  require(steps >= 1, "steps must be >= 1");
  require(n_paths >= 1, "paths must be >= 1");
  require(mode != StepMode::signed_measure, "the signed construction cannot be sampled");
  if (mode == StepMode::flow) {
    require(b.kind() != BackendKind::sphere, "flow walks need a global orthonormal frame (euclidean or carnot backend)");
  } else if (b.kind() == BackendKind::carnot) {
    require(c > 0.0, "carnot geodesic walks need c in (0, 1]");
  } else {
    require(mode == StepMode::full, "riemannian backends only support the full construction");
  }
}

PzTable::PzTable(const CarnotParams& params, int i, double w_max) {
  require(w_max > 0.0 && std::isfinite(w_max), "PzTable: range must be positive and finite");
  const double a = params.alpha_max();
  std::vector<double> humps = panel_edges(0.0, w_max, g_kinks(params, i, w_max), M_PI / a);
  edges_.push_back(0.0);
  for (std::size_t k = 1; k < humps.size(); ++k) {
    double lo = humps[k - 1], hi = humps[k];
    int pieces = lo < 64.0 ? 32 : (lo < 4096.0 ? 8 : 4);
    for (int p = 1; p <= pieces; ++p) edges_.push_back(p == pieces ? hi : lo + (hi - lo) * p / pieces);
  }
  const GaussRule& rule = gauss_legendre(16);
  auto f = [&](double w) { return std::abs(g_fun(params, i, w)); };
  f_.resize(edges_.size());
  for (std::size_t k = 0; k < edges_.size(); ++k) f_[k] = f(edges_[k]);
  cum_.assign(edges_.size(), 0.0);
  for (std::size_t k = 1; k < edges_.size(); ++k)
    cum_[k] = cum_[k - 1] + std::abs(gauss_panel([&](double w) { return g_fun(params, i, w); }, edges_[k - 1],
                                                 edges_[k], rule));
}

double PzTable::sample(double u) const {
  const double target = u * cum_.back();
  std::size_t k = static_cast<std::size_t>(std::upper_bound(cum_.begin(), cum_.end(), target) - cum_.begin());
  k = std::clamp<std::size_t>(k, 1, cum_.size() - 1) - 1;
  const double mass = cum_[k + 1] - cum_[k];
  const double r = mass > 0.0 ? std::clamp((target - cum_[k]) / mass, 0.0, 1.0) : 0.5;
  const double f0 = f_[k], f1 = f_[k + 1], m = 0.5 * (f0 + f1);
  double t = r;
  if (m > 0.0) t = 2.0 * r * m / (f0 + std::sqrt(std::max(0.0, f0 * f0 + 2.0 * (f1 - f0) * r * m)));
  t = std::clamp(t, 0.0, 1.0);
  return edges_[k] + t * (edges_[k + 1] - edges_[k]);
}

double PzTable::cdf(double w) const {
  if (w <= 0.0) return 0.0;
  if (w >= edges_.back()) return 1.0;
  std::size_t k = static_cast<std::size_t>(std::upper_bound(edges_.begin(), edges_.end(), w) - edges_.begin()) - 1;
  const double h = edges_[k + 1] - edges_[k];
  const double t = (w - edges_[k]) / h;
  const double f0 = f_[k], f1 = f_[k + 1], m = 0.5 * (f0 + f1);
  double frac = m > 0.0 ? (f0 * t + 0.5 * (f1 - f0) * t * t) / m : t;
  return (cum_[k] + frac * (cum_[k + 1] - cum_[k])) / cum_.back();
}

std::shared_ptr<const PzTable> pz_table(const CarnotParams& params, int i, double w_max) {
  static std::mutex mu;
  static std::map<std::tuple<std::vector<double>, int, double>, std::shared_ptr<const PzTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{params.alphas(), i, w_max}];
  if (!slot) slot = std::make_shared<const PzTable>(params, i, w_max);
  return slot;
}

Vec uniform_sphere(Philox& rng, int n) {
  Vec v(n);
  if (n == 1) {
    v[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return v;
  }
  if (n == 2) {
    const double th = 2.0 * M_PI * rng.uniform();
    v << std::cos(th), std::sin(th);
    return v;
  }
  double norm2 = 0.0;
  do {
    for (int k = 0; k < n; ++k) v[k] = rng.normal();
    norm2 = v.squaredNorm();
  } while (norm2 == 0.0);
  return v / std::sqrt(norm2);
}

DirectionSampler::DirectionSampler(const Backend& b, double c, double eps, StepMode mode)
    : backend_(b), c_(c), eps_(eps), mode_(mode) {
  WalkConfig{eps, c, mode, 1, 1, 0}.validate(b);
  if (b.kind() == BackendKind::carnot && mode != StepMode::flow) {
    const auto& p = b.params();
    const double w_max = mode == StepMode::minimizing ? 2.0 * M_PI * c / p.alpha_max() : g_integrals(p).y_max;
    double total = 0.0;
    for (int i = 0; i < p.d(); ++i) {
      tables_.push_back(pz_table(p, i, w_max));
      total += tables_.back()->mass();
      block_cdf_.push_back(total);
    }
    for (double& x : block_cdf_) x /= total;
  }
}

double DirectionSampler::displacement_bound(const Vec& q) const {
  const double s = scale();
  if (backend_.kind() != BackendKind::carnot) return s;
  const double a = backend_.params().alpha_max();
  const double xn = q.head(q.size() - 1).norm();
  const double dz = (mode_ == StepMode::flow ? 0.0 : 0.25 * a * s * s) + 0.5 * a * xn * s;
  return std::sqrt(s * s + dz * dz);
}

Vec DirectionSampler::endpoint(const Vec& q, const Direction& dir, double t) const {
  if (mode_ == StepMode::flow) return flow_endpoint(backend_, q, std::get<Vec>(dir), t);
  switch (backend_.kind()) {
    case BackendKind::euclidean: return q + t * std::get<Vec>(dir);
    case BackendKind::sphere: {
      Vec r = std::cos(t) * q + std::sin(t) * std::get<Vec>(dir);
      return r / r.norm();
    }
    case BackendKind::carnot: {
      const auto& p = backend_.params();
      const Covector& cov = std::get<Covector>(dir);
      GroupPoint e = apply_exp_coefficients(p, exp_coefficients(p, t, cov.pz), cov.px);
      const int k = p.rank();
      Vec out(k + 1);
      out.head(k) = q.head(k) + e.x;
      out[k] = q[k] + e.z + 0.5 * q.head(k).dot(p.apply_A(e.x));
      return out;
    }
  }
  return q;
}

Direction DirectionSampler::propose(Philox& rng, const Vec& q) const {
  if (mode_ == StepMode::flow) return uniform_sphere(rng, backend_.rank());
  switch (backend_.kind()) {
    case BackendKind::euclidean: return uniform_sphere(rng, backend_.ambient_dim());
    case BackendKind::sphere: {
      auto [e1, e2] = sphere_tangent_basis(q);
      Vec u = uniform_sphere(rng, 2);
      return Vec(u[0] * e1 + u[1] * e2);
    }
    case BackendKind::carnot: {
      const auto& p = backend_.params();
      const int d = p.d();
      int i = 0;
      if (d > 1) {
        const double u = rng.uniform();
        while (i < d - 1 && u > block_cdf_[i]) ++i;
      }
      double w = tables_[i]->sample(rng.uniform());
      if (rng.uniform() < 0.5) w = -w;
      Covector cov;
      for (long trial = 0;; ++trial) {
        if (trial >= kRejectionCap) throw NumericalError("direction sampler: rejection cap reached");
        cov.px = uniform_sphere(rng, p.rank());
        if (d == 1 || rng.uniform() < cov.block_norm2(i)) break;
      }
      cov.pz = w / scale();
      return cov;
    }
  }
  return Vec();
}

Direction DirectionSampler::sample(Philox& rng, const Vec& q) const {
  const Polynomial& h = backend_.weight();
  if (backend_.weight_is_constant() || scale() == 0.0) return propose(rng, q);
  const double bound = weight_upper_bound(h, q, displacement_bound(q));
  for (long trial = 0; trial < kRejectionCap; ++trial) {
    Direction dir = propose(rng, q);
    const double accept = std::exp(h.value(endpoint(q, dir, scale())) - bound);
    if (rng.uniform() < accept) return dir;
  }
  throw NumericalError("direction sampler: rejection cap reached");
}

Vec DirectionSampler::step(Philox& rng, const Vec& q) const { return endpoint(q, sample(rng, q), eps_); }

Direction sample_direction(Philox& rng, const StepDensity& density) {
  require(density.is_probability(), "the signed construction cannot be sampled");
  DirectionSampler s(density.backend(), density.c(), density.eps(), density.mode());
  return s.sample(rng, density.base_point());
}

Vec walk_step(Philox& rng, const Backend& b, const Vec& q, const WalkConfig& cfg) {
  cfg.validate(b);
  b.check_point(q);
  return DirectionSampler(b, cfg.c, cfg.eps, cfg.mode).step(rng, q);
}

std::vector<Path> simulate_paths(const Backend& b, const Vec& q0, const WalkConfig& cfg, Execution ex) {
  cfg.validate(b);
  b.check_point(q0);
  if ((cfg.steps + 1) > kPathPointBudget / cfg.n_paths)
    throw ValidationError("simulate_paths: steps * paths exceeds the storage budget");
  DirectionSampler sampler(b, cfg.c, cfg.eps, cfg.mode);
  const double dt = cfg.time_step(b);
  const int n = b.ambient_dim();
  std::vector<Path> paths(cfg.n_paths);
  for_each_index(static_cast<std::size_t>(cfg.n_paths), ex, [&](std::size_t k) {
    Philox rng(cfg.seed, stream_id(StreamDomain::path, k));
    Path& path = paths[k];
    path.dim = n;
    path.coords.resize(static_cast<std::size_t>(cfg.steps + 1) * n);
    path.times.resize(cfg.steps + 1);
    Vec q = q0;
    for (long m = 0; m <= cfg.steps; ++m) {
      if (m > 0) q = sampler.step(rng, q);
      std::copy(q.data(), q.data() + n, path.coords.data() + m * n);
      path.times[m] = m * dt;
    }
  });
  return paths;
}

std::vector<Vec> simulate_terminal(const Backend& b, const Vec& q0, const WalkConfig& cfg, Execution ex) {
  cfg.validate(b);
  b.check_point(q0);
  DirectionSampler sampler(b, cfg.c, cfg.eps, cfg.mode);
  std::vector<Vec> out(cfg.n_paths);
  for_each_index(static_cast<std::size_t>(cfg.n_paths), ex, [&](std::size_t k) {
    Philox rng(cfg.seed, stream_id(StreamDomain::path, k));
    Vec q = q0;
    for (long m = 0; m < cfg.steps; ++m) q = sampler.step(rng, q);
    out[k] = q;
  });
  return out;
}

}  // namespace vswalk
