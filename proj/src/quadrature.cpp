#include "vswalk/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <omp.h>

#include "vswalk/parallel.hpp"

namespace vswalk {

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

void configure_threads_from_env() {
  if (const char* s = std::getenv("VSWALK_THREADS")) {
    int n = std::atoi(s);
    if (n > 0) omp_set_num_threads(n);
  }
}

namespace {

GaussRule compute_legendre(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  require(n >= 1 && n <= 512, "gauss_legendre: order out of range");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(compute_legendre(n));
  return *slot;
}

GaussRule gauss_gegenbauer(int m, double lambda) {
  require(m >= 1, "gauss_gegenbauer: need at least one node");
  require(lambda > -0.5, "gauss_gegenbauer: lambda must exceed -1/2");
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    double gamma = k * (k + 2.0 * lambda - 1.0) / (4.0 * (k + lambda) * (k + lambda - 1.0));
    jac(k, k - 1) = jac(k - 1, k) = std::sqrt(gamma);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  GaussRule r;
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    r.nodes.push_back(es.eigenvalues()[j]);
    double v = es.eigenvectors()(0, j);
    r.weights.push_back(v * v);
    total += v * v;
  }
  for (double& w : r.weights) w /= total;
  return r;
}

SphereRule sphere_rule(int n, int m) {
  require(n >= 1 && n <= kMaxDim, "sphere_rule: dimension out of range");
  require(m >= 1, "sphere_rule: order must be positive");
  SphereRule r;
  r.dim = n;
  if (n == 1) {
    r.coords = {1.0, -1.0};
    r.weights = {0.5, 0.5};
    return r;
  }
  if (n == 2) {
    const int k = 2 * m;
    for (int j = 0; j < k; ++j) {
      double th = 2.0 * M_PI * (j + 0.5) / k;
      r.coords.push_back(std::cos(th));
      r.coords.push_back(std::sin(th));
      r.weights.push_back(1.0 / k);
    }
    return r;
  }
  SphereRule sub = sphere_rule(n - 1, m);
  GaussRule g = gauss_gegenbauer(m, 0.5 * (n - 2));
  for (std::size_t a = 0; a < g.nodes.size(); ++a) {
    double t = g.nodes[a], s = std::sqrt(std::max(0.0, 1.0 - t * t));
    for (std::size_t b = 0; b < sub.size(); ++b) {
      r.coords.push_back(t);
      const double* y = sub.point(b);
      for (int k = 0; k < n - 1; ++k) r.coords.push_back(s * y[k]);
      r.weights.push_back(g.weights[a] * sub.weights[b]);
    }
  }
  return r;
}

std::vector<double> panel_edges(double a, double b, const std::vector<double>& breakpoints, double max_width) {
  require(b >= a, "panel_edges: empty interval");
  require(max_width > 0.0, "panel_edges: max width must be positive");
  std::vector<double> cuts{a};
  for (double x : breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> edges{a};
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    double lo = edges.back(), hi = cuts[i];
    if (hi - lo <= 1e-14 * std::max(1.0, std::abs(hi))) continue;
    int pieces = static_cast<int>(std::ceil((hi - lo) / max_width));
    for (int k = 1; k < pieces; ++k) edges.push_back(lo + (hi - lo) * k / pieces);
    edges.push_back(hi);
  }
  if (edges.size() == 1) edges.push_back(b);
  return edges;
}

}  // namespace vswalk
