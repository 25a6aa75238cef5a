#include "vswalk/backend.hpp"

#include <cmath>

#include "vswalk/errors.hpp"

namespace vswalk {

namespace {

constexpr double kUnitTol = 1e-9;

Polynomial weight_or_zero(const std::optional<Polynomial>& h, int dim) {
  if (!h) return Polynomial::constant(dim, 0.0);
  require(h->dim() == dim, "weight dimension does not match backend");
  require(h->degree() <= 2, "weight must have degree <= 2");
  return *h;
}

}  // namespace

Backend::Backend(BackendKind kind, int dim, Polynomial h, std::optional<CarnotParams> params)
    : kind_(kind), dim_(dim), h_(std::move(h)), params_(std::move(params)) {}

Backend Backend::euclidean(int n, std::optional<Polynomial> h) {
  require(n >= 1 && n <= kMaxDim, "euclidean dimension out of range");
  return Backend(BackendKind::euclidean, n, weight_or_zero(h, n), std::nullopt);
}

Backend Backend::sphere(std::optional<Polynomial> h) {
  return Backend(BackendKind::sphere, 3, weight_or_zero(h, 3), std::nullopt);
}

Backend Backend::carnot(CarnotParams params, std::optional<Polynomial> h) {
  int n = params.dim();
  return Backend(BackendKind::carnot, n, weight_or_zero(h, n), std::move(params));
}

int Backend::rank() const {
  switch (kind_) {
    case BackendKind::euclidean: return dim_;
    case BackendKind::sphere: return 2;
    case BackendKind::carnot: return dim_ - 1;
  }
  return dim_;
}

const CarnotParams& Backend::params() const {
  if (!params_) throw ValidationError("backend is not a Carnot group");
  return *params_;
}

std::string Backend::name() const {
  switch (kind_) {
    case BackendKind::euclidean: return "euclidean";
    case BackendKind::sphere: return "sphere";
    case BackendKind::carnot: return "carnot";
  }
  return "?";
}

void Backend::check_point(const Vec& q) const {
  require(q.size() == dim_, "point dimension does not match backend");
  require(q.allFinite(), "point must be finite");
  if (kind_ == BackendKind::sphere) require(std::abs(q.norm() - 1.0) < kUnitTol, "point is not on the unit sphere");
}

Backend Backend::with_weight(Polynomial h) const {
  Backend b = *this;
  b.h_ = weight_or_zero(h, dim_);
  return b;
}

Vec backend_exp(const Backend& b, const Vec& q, const Direction& dir, double t) {
  b.check_point(q);
  require(std::isfinite(t) && t >= 0.0, "backend_exp: t must be finite and >= 0");
  switch (b.kind()) {
    case BackendKind::euclidean: {
      const Vec* v = std::get_if<Vec>(&dir);
      require(v && v->size() == b.ambient_dim(), "euclidean direction must be a vector of matching size");
      require(std::abs(v->norm() - 1.0) < kUnitTol, "direction must be unit-norm");
      return q + t * (*v);
    }
    case BackendKind::sphere: {
      const Vec* v = std::get_if<Vec>(&dir);
      require(v && v->size() == 3, "sphere direction must be a 3-vector");
      require(std::abs(v->norm() - 1.0) < kUnitTol, "direction must be unit-norm");
      require(std::abs(v->dot(q)) < kUnitTol, "sphere direction must be tangent");
      return std::cos(t) * q + std::sin(t) * (*v);
    }
    case BackendKind::carnot: {
      const Covector* c = std::get_if<Covector>(&dir);
      require(c && c->px.size() == b.rank(), "carnot direction must be a covector of matching size");
      require(std::abs(c->px.norm() - 1.0) < kUnitTol, "covector must lie on the unit cylinder");
      const auto& p = b.params();
      return group_mul(p, GroupPoint::from_vec(q), carnot_exp(p, t, *c)).to_vec();
    }
  }
  return q;
}

double backend_jacobian(const Backend& b, const Vec& q, const Direction& dir, double t) {
  require(t > 0.0, "backend_jacobian: t must be positive");
  switch (b.kind()) {
    case BackendKind::euclidean: return 1.0;
    case BackendKind::sphere: return std::sin(t) / t;
    case BackendKind::carnot: {
      const Covector* c = std::get_if<Covector>(&dir);
      require(c != nullptr, "carnot direction must be a covector");
      (void)q;
      return jac_det(b.params(), t, *c);
    }
  }
  return 1.0;
}

Vec flow_endpoint(const Backend& b, const Vec& q, const Vec& u, double t) {
  require(u.size() == b.rank(), "flow direction size mismatch");
  switch (b.kind()) {
    case BackendKind::euclidean: return q + t * u;
    case BackendKind::carnot: {
      const auto& p = b.params();
      GroupPoint step{t * u, 0.0};
      return group_mul(p, GroupPoint::from_vec(q), step).to_vec();
    }
    case BackendKind::sphere: break;
  }
  throw ValidationError("flow walks need a global orthonormal frame (euclidean or carnot backend)");
}

}  // namespace vswalk
