// Serial reference vs OpenMP kernels: wall time and agreement of results.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "vswalk/constants.hpp"
#include "vswalk/estimator.hpp"
#include "vswalk/sampling.hpp"

using namespace vswalk;

namespace {

double seconds(const std::function<double(Execution)>& f, Execution ex, double& result) {
  const auto t0 = std::chrono::steady_clock::now();
  result = f(ex);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const char* name, const std::function<double(Execution)>& f) {
  double rs = 0.0, rp = 0.0;
  f(Execution::serial);  // fills lazily built tables
  const double ts = seconds(f, Execution::serial, rs);
  const double tp = seconds(f, Execution::parallel, rp);
  std::printf("%-34s %10.3f %10.3f %8.2fx   %s\n", name, ts, tp, ts / tp, rs == rp ? "identical" : "DIFFERENT");
}

}  // namespace

int main() {
  configure_threads_from_env();
  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-34s %10s %10s %9s   %s\n", "kernel", "serial s", "parallel s", "speedup", "result");

  const CarnotParams heis = CarnotParams::heisenberg(1);
  const Backend hb = Backend::carnot(heis);
  const Polynomial phi = Polynomial::parse("x1^2 + x2^2 + z", 3);

  row("paths: heisenberg 2000 x 500", [&](Execution ex) {
    WalkConfig cfg{0.1, 0.5, StepMode::full, 500, 2000, 1};
    double s = 0.0;
    for (const Vec& v : simulate_terminal(hb, Vec::Zero(3), cfg, ex)) s += phi.value(v);
    return s;
  });
  row("paths: euclidean weighted 4000x500", [&](Execution ex) {
    Backend b = Backend::euclidean(3, Polynomial::linear(Vec::Constant(3, 0.3)));
    WalkConfig cfg{0.1, 1.0, StepMode::full, 500, 4000, 2};
    double s = 0.0;
    for (const Vec& v : simulate_terminal(b, Vec::Zero(3), cfg, ex)) s += v.squaredNorm();
    return s;
  });
  row("monte carlo: heisenberg 1e6", [&](Execution ex) {
    EstimateOptions opt{Method::monte_carlo, 1'000'000, 3, ex};
    return estimate_Leps(hb, Vec::Zero(3), 0.5, 0.1, StepMode::full, phi, opt).value;
  });
  row("cylinder quadrature: heisenberg", [&](Execution ex) {
    EstimateOptions opt{Method::quadrature, 0, 0, ex};
    return estimate_Leps(hb, Vec::Zero(3), 0.5, 0.1, StepMode::full, phi, opt).value;
  });
  row("cylinder quadrature: alphas 1,2", [&](Execution ex) {
    Backend b = Backend::carnot(CarnotParams({1.0, 2.0}));
    EstimateOptions opt{Method::quadrature, 0, 0, ex};
    return estimate_Leps(b, Vec::Zero(5), 0.5, 0.1, StepMode::full, Polynomial::parse("x1^2 + x3*z", 5), opt).value;
  });
  row("sigma curve: alphas 1,2,3 x 40", [&](Execution ex) {
    std::vector<double> cs;
    for (int k = 1; k <= 40; ++k) cs.push_back(k / 40.0);
    double s = 0.0;
    for (const SigmaResult& r : sigma_curve(CarnotParams({1.0, 2.0, 3.0}), cs, Construction::full, ex))
      for (double v : r.values) s += v;
    return s;
  });
  return 0;
}
