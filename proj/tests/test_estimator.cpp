#include <doctest.h>

#include <cmath>

#include "vswalk/constants.hpp"
#include "vswalk/errors.hpp"
#include "vswalk/estimator.hpp"

using namespace vswalk;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Polynomial norm2(int n, int count) {
  Polynomial p(n);
  for (int i = 0; i < count; ++i) p = p + Polynomial::coordinate(n, i) * Polynomial::coordinate(n, i);
  return p;
}

GeneratorSpec heisenberg_spec(double c, Polynomial h) {
  GeneratorSpec s;
  s.variant = GeneratorVariant::heisenberg_geodesic;
  s.backend = Backend::carnot(CarnotParams::heisenberg(1), h);
  s.c = c;
  s.sigma = sigma_coeffs(CarnotParams::heisenberg(1), c, Construction::full);
  return s;
}

}  // namespace

TEST_CASE("flat quadratic: L^eps |x|^2 (0) = 2n for every eps") {
  for (int n = 1; n <= 4; ++n) {
    Backend b = Backend::euclidean(n);
    for (double eps : {1.0, 0.3, 1e-2}) {
      Estimate e = estimate_Leps(b, Vec::Zero(n), 0.5, eps, StepMode::full, norm2(n, n));
      CHECK(e.value == doctest::Approx(2.0 * n).epsilon(1e-12));
    }
  }
  // Doubling the dimension halves delta at fixed eps; |eps u|^2 = eps^2 stays fixed.
  double a = estimate_Leps(Backend::euclidean(2), Vec::Zero(2), 0.0, 0.2, StepMode::full, norm2(2, 2)).value;
  double b = estimate_Leps(Backend::euclidean(4), Vec::Zero(4), 0.0, 0.2, StepMode::full, norm2(4, 4)).value;
  CHECK(b / a == doctest::Approx(2.0).epsilon(1e-13));
  // Same on Carnot groups with equal alphas: d -> 2d doubles k.
  auto horiz = [](int d) {
    Backend bb = Backend::carnot(CarnotParams::heisenberg(d));
    return estimate_Leps(bb, Vec::Zero(2 * d + 1), 0.5, 0.3, StepMode::full, norm2(2 * d + 1, 2 * d)).value;
  };
  const double h1 = horiz(1), h2 = horiz(2);
  CHECK(h1 == doctest::Approx(4.0 * sigma_coeffs(CarnotParams::heisenberg(1), 0.5, Construction::full).values[0])
                  .epsilon(1e-9));
  CHECK(h2 == doctest::Approx(8.0 * sigma_coeffs(CarnotParams::heisenberg(2), 0.5, Construction::full).values[0])
                  .epsilon(1e-9));
}

TEST_CASE("odd terms cancel for h = 0") {
  Backend e3 = Backend::euclidean(3);
  CHECK(std::abs(estimate_Leps(e3, Vec::Zero(3), 0.7, 0.2, StepMode::full, Polynomial::linear(vec({1, -2, 0.5}))).value) <
        1e-12);
  Backend s = Backend::sphere();
  CHECK(std::abs(estimate_Leps(s, vec({0, 0, 1}), 0.5, 0.2, StepMode::full, Polynomial::coordinate(3, 0)).value) <
        1e-10);
  Backend h = Backend::carnot(CarnotParams::heisenberg(1));
  for (StepMode m : {StepMode::full, StepMode::minimizing, StepMode::flow}) {
    Estimate est = estimate_Leps(h, Vec::Zero(3), 0.5, 0.2, m, Polynomial::coordinate(3, 0));
    CHECK(std::abs(est.value) < 1e-8);
  }
}

TEST_CASE("Heisenberg |x|^2 at the origin equals 4 sigma(c)") {
  Backend b = Backend::carnot(CarnotParams::heisenberg(1));
  for (double c : {0.25, 1.0}) {
    const double sigma = sigma_coeffs(CarnotParams::heisenberg(1), c, Construction::full).values[0];
    Estimate e = estimate_Leps(b, Vec::Zero(3), c, 0.1, StepMode::full, norm2(3, 2));
    CHECK(e.value == doctest::Approx(4.0 * sigma).epsilon(1e-8));
    CHECK(e.error < 1e-6);
  }
}

TEST_CASE("euclidean linear weight: L^eps x1 -> 2 c a1") {
  const Vec a = vec({0.3, 0.0, 0.1});
  GeneratorSpec spec;
  spec.variant = GeneratorVariant::riem_geodesic;
  spec.backend = Backend::euclidean(3, Polynomial::linear(a));
  spec.c = 0.5;
  Polynomial phi = Polynomial::coordinate(3, 0);
  CHECK(limit_generator(spec, phi, Vec::Zero(3)) == doctest::Approx(2 * 0.5 * 0.3).epsilon(1e-15));
  ConvergenceReport r = convergence_slope(spec, Vec::Zero(3), phi, {0.2, 0.1, 0.05, 0.025});
  REQUIRE_FALSE(r.below_tolerance);
  CHECK(r.status() == "fitted");
  CHECK(r.points_used == 4);
  // The remainder is even in eps here, so the fitted slope sits near 2.
  CHECK(r.fitted_slope >= 0.8);
  CHECK(r.fitted_slope == doctest::Approx(2.0).epsilon(0.05));
  for (std::size_t k = 1; k < r.errors.size(); ++k) CHECK(r.errors[k] < r.errors[k - 1]);
}

TEST_CASE("errors at machine noise are reported below tolerance") {
  GeneratorSpec spec;
  spec.variant = GeneratorVariant::riem_geodesic;
  spec.backend = Backend::euclidean(3);
  spec.c = 0.5;
  ConvergenceReport r = convergence_slope(spec, Vec::Zero(3), norm2(3, 3), {0.4, 0.2, 0.1, 0.05});
  CHECK(r.below_tolerance);
  CHECK(r.status() == "converged below tolerance");
  CHECK(std::isnan(r.fitted_slope));

  // Homogeneous phi at the origin on Heisenberg: exact in eps as well.
  GeneratorSpec hs = heisenberg_spec(0.5, Polynomial::constant(3, 0.0));
  ConvergenceReport hr = convergence_slope(hs, Vec::Zero(3), Polynomial::parse("x1^2", 3), {0.4, 0.2, 0.1, 0.05});
  CHECK(hr.below_tolerance);
  CHECK(hr.target == doctest::Approx(2.0 * hs.sigma->values[0]).epsilon(1e-15));
  for (const Estimate& e : hr.estimates) CHECK(e.value == doctest::Approx(hr.target).epsilon(1e-8));
}

TEST_CASE("Heisenberg slope away from the origin with a weight") {
  GeneratorSpec hs = heisenberg_spec(0.5, Polynomial::parse("0.4*x1 - 0.2*x2", 3));
  ConvergenceReport r =
      convergence_slope(hs, vec({0.3, -0.2, 0.1}), Polynomial::parse("x1^2 + x2^2 + x1*z", 3), {0.4, 0.2, 0.1, 0.05});
  REQUIRE_FALSE(r.below_tolerance);
  MESSAGE("heisenberg weighted slope " << r.fitted_slope);
  CHECK(r.fitted_slope >= 0.8);
}

TEST_CASE("Monte Carlo agrees with quadrature") {
  struct Case {
    Backend b;
    Vec q;
    double c, eps;
    StepMode mode;
    Polynomial phi;
  };
  const CarnotParams p12({1.0, 2.0});
  std::vector<Case> cases = {
      {Backend::euclidean(3, Polynomial::linear(vec({0.3, 0, 0.1}))), vec({0.1, 0.2, -0.3}), 0.5, 0.3, StepMode::full,
       Polynomial::parse("x1^2 + x1*x3 + x2", 3)},
      {Backend::sphere(Polynomial::linear(vec({0.2, 0.1, 0}))), vec({0, 0.6, 0.8}), 1.0, 0.2, StepMode::full,
       Polynomial::parse("x1 + x1*x2 + x3^2", 3)},
      {Backend::carnot(CarnotParams::heisenberg(1), Polynomial::linear(vec({0.3, -0.1, 0.0}))), vec({0.1, 0.2, 0}),
       0.5, 0.3, StepMode::full, Polynomial::parse("x1^2 + z + x2*z", 3)},
      {Backend::carnot(p12), vec({0.1, 0, 0, 0.2, 0.1}), 0.5, 0.3, StepMode::minimizing,
       Polynomial::parse("x1*x3 + z + x4^2", 5)},
      {Backend::carnot(p12, Polynomial::linear(vec({0.2, 0, 0, -0.1, 0}))), vec({0, 0.1, 0, 0, 0}), 1.0, 0.3,
       StepMode::flow, Polynomial::parse("x1^2 + x2*z", 5)},
  };
  std::uint64_t seed = 11;
  for (const Case& cs : cases) {
    Estimate qd = estimate_Leps(cs.b, cs.q, cs.c, cs.eps, cs.mode, cs.phi);
    EstimateOptions opt{Method::monte_carlo, 200000, seed++, Execution::parallel};
    Estimate mc = estimate_Leps(cs.b, cs.q, cs.c, cs.eps, cs.mode, cs.phi, opt);
    INFO(cs.b.name() << " " << to_string(cs.mode));
    CHECK(std::abs(mc.value - qd.value) < 4.0 * mc.error);
    CHECK(qd.error < 1e-3 * mc.error);
  }
}

TEST_CASE("Monte Carlo is reproducible across execution modes") {
  Backend b = Backend::carnot(CarnotParams::heisenberg(1));
  Polynomial phi = Polynomial::parse("x1^2 + z", 3);
  EstimateOptions par{Method::monte_carlo, 20000, 5, Execution::parallel};
  EstimateOptions ser{Method::monte_carlo, 20000, 5, Execution::serial};
  Estimate a = estimate_Leps(b, Vec::Zero(3), 0.5, 0.2, StepMode::full, phi, par);
  Estimate c = estimate_Leps(b, Vec::Zero(3), 0.5, 0.2, StepMode::full, phi, ser);
  CHECK(a.value == c.value);
  CHECK(a.error == c.error);
}

TEST_CASE("estimator validation") {
  Backend e = Backend::euclidean(2);
  Polynomial phi = Polynomial::coordinate(2, 0);
  EstimateOptions few{Method::monte_carlo, 999, 1, Execution::serial};
  CHECK_THROWS_AS(estimate_Leps(e, Vec::Zero(2), 0.5, 0.1, StepMode::full, phi, few), ValidationError);
  CHECK_THROWS_AS(estimate_Leps(e, Vec::Zero(2), 0.5, 0.0, StepMode::full, phi), ValidationError);
  CHECK_THROWS_AS(estimate_Leps(e, Vec::Zero(2), 1.5, 0.1, StepMode::full, phi), ValidationError);
  CHECK_THROWS_AS(estimate_Leps(e, Vec::Zero(2), 0.5, 0.1, StepMode::minimizing, phi), ValidationError);
  CHECK_THROWS_AS(estimate_Leps(e, Vec::Zero(2), 0.5, 0.1, StepMode::full, Polynomial::coordinate(3, 0)),
                  ValidationError);
  CHECK_THROWS_AS(estimate_Leps(Backend::sphere(), vec({0, 0, 1}), 0.5, 0.1, StepMode::flow, Polynomial(3)),
                  ValidationError);
  Backend h = Backend::carnot(CarnotParams::heisenberg(1));
  EstimateOptions mc{Method::monte_carlo, 1000, 1, Execution::serial};
  CHECK_THROWS_AS(estimate_Leps(h, Vec::Zero(3), 0.5, 0.1, StepMode::signed_measure, Polynomial(3), mc),
                  ValidationError);
  CHECK_THROWS_AS(estimate_Leps(h, Vec::Zero(3), 0.0, 0.1, StepMode::full, Polynomial(3)), ValidationError);

  GeneratorSpec spec;
  spec.backend = e;
  CHECK_THROWS_AS(convergence_slope(spec, Vec::Zero(2), phi, {0.1, 0.2, 0.05, 0.01}), ValidationError);
  CHECK_THROWS_AS(convergence_slope(spec, Vec::Zero(2), phi, {0.1, 0.05, 0.01}), ValidationError);
  CHECK_THROWS_AS(euler_weak_compare(spec, Vec::Zero(2), 1.0, 1e-3, 1e-3, 100000, phi, 1), ValidationError);
  CHECK(parse_method("mc") == Method::monte_carlo);
  CHECK_THROWS_AS(parse_method("exact"), ValidationError);
}

TEST_CASE("weak comparison against Euler-Maruyama") {
  GeneratorSpec spec;
  spec.variant = GeneratorVariant::riem_geodesic;
  spec.backend = Backend::euclidean(2);
  spec.c = 0.5;
  WeakCompare w = euler_weak_compare(spec, Vec::Zero(2), 0.5, 0.1, 1e-2, 20000, norm2(2, 2), 3);
  CHECK(w.walk_steps == 200);
  CHECK(w.euler_steps == 50);
  CHECK(std::abs(w.z) < 4.0);
  CHECK(w.walk_mean == doctest::Approx(2.0).epsilon(0.05));
  WeakCompare s = euler_weak_compare(spec, Vec::Zero(2), 0.5, 0.1, 1e-2, 20000, norm2(2, 2), 3, Execution::serial);
  CHECK(s.walk_mean == w.walk_mean);
  CHECK(s.euler_mean == w.euler_mean);

  // Sphere with a weight, where the reference SDE carries the projected drift.
  GeneratorSpec sp;
  sp.variant = GeneratorVariant::riem_geodesic;
  sp.backend = Backend::sphere(Polynomial::linear(vec({0.0, 0.0, 1.0})));
  sp.c = 1.0;
  WeakCompare ws = euler_weak_compare(sp, vec({1, 0, 0}), 0.3, 0.1, 1e-3, 20000, Polynomial::coordinate(3, 2), 4);
  CHECK(std::abs(ws.z) < 4.0);
}
