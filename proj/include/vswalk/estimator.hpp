#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vswalk/measures.hpp"
#include "vswalk/operators.hpp"
#include "vswalk/parallel.hpp"

namespace vswalk {

enum class Method { quadrature, monte_carlo };

Method parse_method(const std::string& s);
std::string to_string(Method m);

struct EstimateOptions {
  Method method = Method::quadrature;
  long samples = 0;  // Monte Carlo only; at least 1000
  std::uint64_t seed = 0;
  Execution exec = Execution::parallel;
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;  // standard error (Monte Carlo) or quadrature error estimate
};

// (1/delta) E[phi(q_delta) - phi(q)] for one step from q, delta = eps^2 / (2k).
Estimate estimate_Leps(const Backend& b, const Vec& q, double c, double eps, StepMode mode, const Polynomial& phi,
                       const EstimateOptions& opt = {});

// Step construction whose small-eps limit the variant describes.
StepMode step_mode_for(const GeneratorSpec& spec);

struct ConvergenceReport {
  std::vector<double> eps_grid;
  std::vector<Estimate> estimates;
  std::vector<double> errors;
  std::vector<double> noise_floor;
  double target = 0.0;
  double fitted_slope = 0.0;
  int points_used = 0;
  bool below_tolerance = false;  // fewer than two errors above the noise floor

  std::string status() const { return below_tolerance ? "converged below tolerance" : "fitted"; }
};

// eps_grid must be strictly decreasing with at least four entries.
ConvergenceReport convergence_slope(const GeneratorSpec& spec, const Vec& q, const Polynomial& phi,
                                    const std::vector<double>& eps_grid, const EstimateOptions& opt = {});

struct WeakCompare {
  double walk_mean = 0.0, walk_stderr = 0.0;
  double euler_mean = 0.0, euler_stderr = 0.0;
  double pooled_stderr = 0.0;
  double z = 0.0;
  long walk_steps = 0, euler_steps = 0;
};

inline constexpr double kWeakCompareBudget = 2e9;  // steps * paths per simulator

// E[phi] at time T for the walk matching the variant and for an Euler-Maruyama solution of the
// SDE whose generator is the variant's limit operator.
WeakCompare euler_weak_compare(const GeneratorSpec& spec, const Vec& q0, double T, double eps, double dt, long n_paths,
                               const Polynomial& phi, std::uint64_t seed, Execution ex = Execution::parallel);

}  // namespace vswalk
