#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "vswalk/constants.hpp"
#include "vswalk/parallel.hpp"
#include "vswalk/quadrature.hpp"

namespace vswalk {

// Integration over S^{2d-1} x [-w_max, w_max] against sum_i g_i(w) |p^i|^2 dOmega dw (or |g_i|).
struct CylinderSpec {
  double w_max = 0.0;
  bool signed_kernel = false;
  double max_width = 1.0;  // panel width cap in w
  int gauss_order = 16;    // an embedded half-order rule provides the error estimate
};

template <std::size_t K>
struct CylinderResult {
  std::array<double, K> value{};
  std::array<double, K> error{};
};

// f(w) returns a callable node(px, out) writing K integrand values at the cylinder point (px, w);
// px has 2d entries. Per-w work belongs in f, per-point work in node.
template <std::size_t K, class F>
CylinderResult<K> cylinder_integrate(const CarnotParams& params, const CylinderSpec& spec, const SphereRule& rule,
                                     F&& f, Execution ex) {
  require(spec.w_max > 0.0 && std::isfinite(spec.w_max), "cylinder_integrate: w_max must be positive and finite");
  require(rule.dim == params.rank(), "cylinder_integrate: sphere rule dimension mismatch");
  const std::vector<double> half = panel_edges(0.0, spec.w_max, g_kinks_all(params, spec.w_max), spec.max_width);
  // Mirror to a symmetric set of panels.
  std::vector<double> edges;
  for (std::size_t k = half.size(); k-- > 1;) edges.push_back(-half[k]);
  edges.insert(edges.end(), half.begin(), half.end());
  const std::size_t np = edges.size() - 1;
  const GaussRule& hi_rule = gauss_legendre(spec.gauss_order);
  const GaussRule& lo_rule = gauss_legendre(spec.gauss_order / 2);
  const int d = params.d();

  std::vector<double> hi(np * K), lo(np * K);
  auto node_value = [&](double w, std::array<double, K>& acc) {
    double g[kMaxDim / 2];
    for (int i = 0; i < d; ++i) {
      double v = g_fun(params, i, w);
      g[i] = spec.signed_kernel ? v : std::abs(v);
    }
    acc.fill(0.0);
    std::array<double, K> tmp;
    auto node = f(w);
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const double* px = rule.point(j);
      double kern = 0.0;
      for (int i = 0; i < d; ++i) kern += g[i] * (px[2 * i] * px[2 * i] + px[2 * i + 1] * px[2 * i + 1]);
      if (kern == 0.0) continue;
      node(px, tmp);
      for (std::size_t k = 0; k < K; ++k) acc[k] += rule.weights[j] * kern * tmp[k];
    }
  };
  for_each_index(np, ex, [&](std::size_t p) {
    const double a = edges[p], b = edges[p + 1];
    const double hw = 0.5 * (b - a), mid = 0.5 * (a + b);
    std::array<double, K> acc, sum_hi{}, sum_lo{};
    for (std::size_t n = 0; n < hi_rule.nodes.size(); ++n) {
      node_value(mid + hw * hi_rule.nodes[n], acc);
      for (std::size_t k = 0; k < K; ++k) sum_hi[k] += hi_rule.weights[n] * acc[k];
    }
    for (std::size_t n = 0; n < lo_rule.nodes.size(); ++n) {
      node_value(mid + hw * lo_rule.nodes[n], acc);
      for (std::size_t k = 0; k < K; ++k) sum_lo[k] += lo_rule.weights[n] * acc[k];
    }
    for (std::size_t k = 0; k < K; ++k) {
      hi[k * np + p] = hw * sum_hi[k];
      lo[k * np + p] = hw * sum_lo[k];
    }
  });
  CylinderResult<K> out;
  for (std::size_t k = 0; k < K; ++k) {
    out.value[k] = pairwise_sum(hi.data() + k * np, np);
    out.error[k] = std::abs(out.value[k] - pairwise_sum(lo.data() + k * np, np));
  }
  return out;
}

}  // namespace vswalk
