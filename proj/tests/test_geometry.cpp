#include <doctest.h>

#include <Eigen/LU>

#include <cmath>
#include <random>

#include "vswalk/backend.hpp"
#include "vswalk/constants.hpp"
#include "vswalk/errors.hpp"
#include "vswalk/geometry.hpp"

using namespace vswalk;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Covector random_unit_cov(std::mt19937_64& gen, int k, double pz_max) {
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u(-pz_max, pz_max);
  Vec p(k);
  for (int i = 0; i < k; ++i) p[i] = n01(gen);
  p /= p.norm();
  return {p, u(gen)};
}

double max_diff(const GroupPoint& a, const GroupPoint& b) {
  return std::max((a.x - b.x).cwiseAbs().maxCoeff(), std::abs(a.z - b.z));
}

// Direct long-double evaluation of g_i; only accurate away from y = 0.
double g_direct(const CarnotParams& p, int i, double y) {
  long double u = 0.5L * y, r = 1.0L;
  for (int j = 0; j < p.d(); ++j) {
    long double al = p.alpha(j), w = al * u;
    long double s = std::sin(w) / u;
    r *= (j == i) ? s * al * al * al * (w * std::cos(w) - std::sin(w)) / (w * w * w) : s * s;
  }
  return static_cast<double>(r);
}

// Central-difference determinant of (px, pz) -> carnot_exp(t; px, pz).
double fd_det(const CarnotParams& p, double t, const Covector& cov, double h) {
  const int n = p.dim();
  Mat J(n, n);
  for (int col = 0; col < n; ++col) {
    Covector a = cov, b = cov;
    if (col < p.rank()) {
      a.px[col] += h;
      b.px[col] -= h;
    } else {
      a.pz += h;
      b.pz -= h;
    }
    J.col(col) = (carnot_exp(p, t, a).to_vec() - carnot_exp(p, t, b).to_vec()) / (2.0 * h);
  }
  return J.determinant();
}

}  // namespace

TEST_CASE("carnot params validation") {
  CHECK_THROWS_AS(CarnotParams({}), ValidationError);
  CHECK_THROWS_AS(CarnotParams({2.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(CarnotParams({0.0}), ValidationError);
  CHECK_THROWS_AS(CarnotParams({-1.0, 1.0}), ValidationError);
  CarnotParams p({1.0, 2.0});
  CHECK(p.d() == 2);
  CHECK(p.rank() == 4);
  CHECK(p.dim() == 5);
  CHECK(p.popp_constant() == doctest::Approx(0.1));
  Mat A = p.A();
  CHECK((A + A.transpose()).norm() == 0.0);
}

TEST_CASE("group law examples") {
  CarnotParams p = CarnotParams::heisenberg(1);
  GroupPoint a{vec({1, 0}), 0}, b{vec({0, 1}), 0};
  GroupPoint r = group_mul(p, a, b);
  CHECK(r.x[0] == 1.0);
  CHECK(r.x[1] == 1.0);
  // x^T A x' with A = [[0,-1],[1,0]]: (1,0).(A(0,1)) = (1,0).(-1,0) = -1
  CHECK(r.z == -0.5);

  std::mt19937_64 gen(11);
  std::normal_distribution<double> n01;
  CarnotParams p3({0.5, 1.5, 2.0});
  auto rnd = [&] {
    GroupPoint g{Vec(6), n01(gen)};
    for (int i = 0; i < 6; ++i) g.x[i] = n01(gen);
    return g;
  };
  for (int k = 0; k < 100; ++k) {
    GroupPoint x = rnd(), y = rnd(), z = rnd();
    CHECK(max_diff(group_mul(p3, group_mul(p3, x, y), z), group_mul(p3, x, group_mul(p3, y, z))) < 1e-12);
    CHECK(max_diff(group_mul(p3, x, group_inverse(x)), GroupPoint{Vec::Zero(6), 0.0}) < 1e-15);
    CHECK(max_diff(group_mul(p3, x, GroupPoint{Vec::Zero(6), 0.0}), x) == 0.0);
  }
}

TEST_CASE("carnot_exp examples") {
  CarnotParams p = CarnotParams::heisenberg(1);
  GroupPoint e = carnot_exp(p, 1.0, {vec({1, 0}), 2.0 * M_PI});
  CHECK(std::abs(e.x[0]) < 1e-15);
  CHECK(std::abs(e.x[1]) < 1e-15);
  CHECK(e.z == doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(1e-14));
  GroupPoint o = hamilton_ode(p, 1.0, {vec({1, 0}), 2.0 * M_PI}, 20000);
  CHECK(max_diff(e, o) < 1e-10);

  CarnotParams p2({1.0, 2.0});
  Covector c{vec({0.6, 0.0, 0.0, 0.8}), 0.0};
  GroupPoint s = carnot_exp(p2, 2.5, c);
  CHECK((s.x - 2.5 * c.px).norm() == 0.0);
  CHECK(s.z == 0.0);
  GroupPoint z0 = carnot_exp(p2, 0.0, {vec({0.6, 0.0, 0.0, 0.8}), 3.0});
  CHECK(z0.x.norm() == 0.0);
  CHECK(z0.z == 0.0);
  CHECK_THROWS_AS(carnot_exp(p2, -1.0, c), ValidationError);
  CHECK_THROWS_AS(carnot_exp(p2, 1.0, {vec({NAN, 0, 0, 1}), 0.0}), ValidationError);
}

TEST_CASE("homogeneity exp(t; a l) = exp(a t; l)") {
  std::mt19937_64 gen(3);
  CarnotParams p({1.0, 2.0, 3.0});
  for (double a : {0.5, 2.0, 3.0}) {
    for (int k = 0; k < 20; ++k) {
      Covector l = random_unit_cov(gen, p.rank(), 4.0);
      Covector al{a * l.px, a * l.pz};
      CHECK(max_diff(carnot_exp(p, 0.7, al), carnot_exp(p, 0.7 * a, l)) < 1e-10);
    }
  }
}

TEST_CASE("B B^* = sinc(y/2)^2 I") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  CarnotParams p = CarnotParams::heisenberg(1);
  for (int k = 0; k < 200; ++k) {
    double y = k == 0 ? 1e-7 : u(gen);
    ExpCoefficients e = exp_coefficients(p, 1.0, y);
    Mat B(2, 2);
    B << e.a[0], -e.b[0], e.b[0], e.a[0];
    double s = std::sin(0.5 * y) / (0.5 * y);
    CHECK(((B * B.transpose()) - s * s * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("unit speed of horizontal part") {
  std::mt19937_64 gen(9);
  CarnotParams p({1.0, 2.0});
  const double h = 1e-5;
  for (int k = 0; k < 20; ++k) {
    Covector l = random_unit_cov(gen, p.rank(), 6.0);
    for (double t : {0.3, 1.0, 2.7}) {
      Vec v = (carnot_exp(p, t + h, l).x - carnot_exp(p, t - h, l).x) / (2 * h);
      CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("g_fun values, parity and series continuity") {
  CarnotParams p = CarnotParams::heisenberg(1);
  // Taylor oracle: sin(u)(u cos u - sin u)/u^4 = -1/3 + O(u^2)
  CHECK(g_fun(p, 0, 0.0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  CHECK(g_fun(p, 0, 1e-6) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(g_fun(p, 0, 2.0 * M_PI)) < 1e-16);
  CHECK_THROWS_AS(g_fun(p, 1, 1.0), ValidationError);

  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.5, 60.0);
  CarnotParams p3({1.0, 2.0, 3.0});
  for (int k = 0; k < 200; ++k) {
    double y = u(gen);
    for (int i = 0; i < 3; ++i) {
      CHECK(g_fun(p3, i, -y) == g_fun(p3, i, y));
      CHECK(g_fun(p3, i, y) == doctest::Approx(g_direct(p3, i, y)).epsilon(1e-11));
    }
  }
  // Series/direct switch sits at alpha_i y / 2 = 0.1.
  for (int i = 0; i < 3; ++i) {
    double ys = 0.2 / p3.alpha(i);
    double lo = g_fun(p3, i, ys * (1 - 1e-12)), hi = g_fun(p3, i, ys * (1 + 1e-12));
    CHECK(std::abs(lo - hi) < 1e-10);
    CHECK(lo == doctest::Approx(g_direct(p3, i, ys)).epsilon(1e-10));
  }
}

TEST_CASE("jac_det closed form vs finite differences") {
  CarnotParams p1 = CarnotParams::heisenberg(1);
  CHECK(jac_det(p1, 1.0, {vec({1, 0}), 0.0}) == doctest::Approx(-1.0 / 12.0).epsilon(1e-14));
  CHECK(-fd_det(p1, 1.0, {vec({1, 0}), 0.0}, 1e-5) == doctest::Approx(-1.0 / 12.0).epsilon(1e-6));
  CHECK(std::abs(jac_det(p1, 1.0, {vec({0.6, 0.8}), 2.0 * M_PI})) < 1e-16);
  CHECK_THROWS_AS(jac_det(p1, 0.0, {vec({1, 0}), 0.0}), ValidationError);

  std::mt19937_64 gen(17);
  for (const CarnotParams& p : {p1, CarnotParams({1.0, 2.0})}) {
    int checked = 0;
    for (int it = 0; it <= 30; ++it) {
      double t = 0.1 + 2.9 * it / 30.0;
      for (int jt = 0; jt <= 40; ++jt) {
        double pz = -10.0 + 20.0 * jt / 40.0;
        Covector l = random_unit_cov(gen, p.rank(), 1.0);
        l.pz = pz;
        double j0 = jac_det(p, t, l);
        // Skip 1e-2 neighbourhoods (in t pz) of zeros.
        auto at = [&](double y) { return jac_det(p, t, {l.px, y / t}); };
        double y = t * pz;
        if ((at(y - 1e-2) > 0) != (j0 > 0) || (at(y + 1e-2) > 0) != (j0 > 0)) continue;
        double fd = -fd_det(p, t, l, 1e-5 * std::max(1.0, std::abs(pz)));
        CHECK(std::abs(fd - j0) <= 1e-4 * std::abs(j0));
        ++checked;
      }
    }
    CHECK(checked > 1000);
  }
}

TEST_CASE("cut time") {
  CarnotParams p1 = CarnotParams::heisenberg(1);
  CHECK(cut_time(p1, {vec({1, 0}), 2.0 * M_PI}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::isinf(cut_time(p1, {vec({1, 0}), 0.0})));
  CarnotParams p2({1.0, 2.0});
  Covector l{vec({0.5, 0.5, 0.5, 0.5}), M_PI};
  CHECK(cut_time(p2, l) == doctest::Approx(1.0).epsilon(1e-15));
  // First zero of t -> jac_det(t, l) by bracketing and bisection.
  double prev = jac_det(p2, 1e-3, l), t0 = 1e-3, t1 = 0.0;
  for (double t = 2e-3; t < 3.0; t += 1e-3) {
    double v = jac_det(p2, t, l);
    if ((v > 0) != (prev > 0)) {
      t1 = t;
      break;
    }
    prev = v;
    t0 = t;
  }
  REQUIRE(t1 > 0.0);
  double a = t0, b = t1;
  for (int k = 0; k < 60; ++k) {
    double m = 0.5 * (a + b);
    ((jac_det(p2, m, l) > 0) == (jac_det(p2, a, l) > 0) ? a : b) = m;
  }
  CHECK(a == doctest::Approx(cut_time(p2, l)).epsilon(1e-9));
}

TEST_CASE("Hamilton flow oracle") {
  std::mt19937_64 gen(23);
  CarnotParams p({1.0, 2.0});
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    Covector l = random_unit_cov(gen, p.rank(), 5.0);
    double t = 0.2 + 2.8 * std::uniform_real_distribution<double>()(gen);
    worst = std::max(worst, max_diff(carnot_exp(p, t, l), hamilton_ode(p, t, l, 10000)));
    HamiltonState s = hamilton_flow(p, t, l, 2000);
    CHECK(s.velocity.norm() == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(worst < 1e-8);
  Covector flat{vec({0.0, 1.0, 0.0, 0.0}), 0.0};
  GroupPoint s = hamilton_ode(p, 2.0, flat, 100);
  CHECK(max_diff(s, GroupPoint{2.0 * flat.px, 0.0}) < 1e-12);
  CHECK_THROWS_AS(hamilton_ode(p, 1.0, flat, 10), ValidationError);
}

TEST_CASE("backend exponential and jacobian") {
  Backend e = Backend::euclidean(3);
  Vec r = backend_exp(e, Vec::Zero(3), Direction{vec({1, 0, 0})}, 2.0);
  CHECK((r - vec({2, 0, 0})).norm() == 0.0);
  CHECK(backend_jacobian(e, Vec::Zero(3), Direction{vec({0, 1, 0})}, 0.7) == 1.0);
  CHECK_THROWS_AS(backend_exp(e, Vec::Zero(3), Direction{vec({1, 1, 0})}, 1.0), ValidationError);

  Backend s = Backend::sphere();
  Vec north = vec({0, 0, 1});
  Vec q = backend_exp(s, north, Direction{vec({1, 0, 0})}, M_PI / 2);
  CHECK((q - vec({1, 0, 0})).norm() < 1e-15);
  CHECK(backend_jacobian(s, north, Direction{vec({1, 0, 0})}, M_PI / 2) == doctest::Approx(2.0 / M_PI));
  CHECK(backend_jacobian(s, north, Direction{vec({1, 0, 0})}, 1e-9) == doctest::Approx(1.0));
  // Area distortion by finite differences: |d exp / d theta| / t at t = pi/2.
  {
    const double t = M_PI / 2, h = 1e-6;
    auto dir = [](double th) { return Direction{vec({std::cos(th), std::sin(th), 0.0})}; };
    Vec d = (backend_exp(s, north, dir(h), t) - backend_exp(s, north, dir(-h), t)) / (2 * h);
    CHECK(d.norm() / t == doctest::Approx(2.0 / M_PI).epsilon(1e-8));
  }
  CHECK_THROWS_AS(backend_exp(s, north, Direction{vec({0, 0, 1})}, 1.0), ValidationError);

  CarnotParams p({1.0, 2.0});
  Backend c = Backend::carnot(p);
  Vec q0 = vec({0.3, -0.2, 1.0, 0.5, 0.7});
  Covector l{vec({0.5, 0.5, -0.5, 0.5}), 1.7};
  Vec got = backend_exp(c, q0, Direction{l}, 0.9);
  Vec want = group_mul(p, GroupPoint::from_vec(q0), carnot_exp(p, 0.9, l)).to_vec();
  CHECK((got - want).norm() < 1e-15);
  CHECK(backend_jacobian(c, q0, Direction{l}, 0.9) == jac_det(p, 0.9, l));
  // Flow endpoint is right translation by (t u, 0).
  Vec u = vec({0.5, 0.5, -0.5, 0.5});
  Vec f = flow_endpoint(c, q0, u, 0.4);
  Vec fw = group_mul(p, GroupPoint::from_vec(q0), GroupPoint{0.4 * u, 0.0}).to_vec();
  CHECK((f - fw).norm() < 1e-15);
}
