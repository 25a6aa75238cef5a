#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "vswalk/measures.hpp"
#include "vswalk/parallel.hpp"
#include "vswalk/rng.hpp"

namespace vswalk {

// Stored path points (steps + 1 per path, summed over paths) may not exceed this.
inline constexpr long kPathPointBudget = 50'000'000;
inline constexpr long kRejectionCap = 1'000'000;

struct WalkConfig {
  double eps = 0.1;
  double c = 0.5;
  StepMode mode = StepMode::full;
  long steps = 1;
  long n_paths = 1;
  std::uint64_t seed = 0;

  void validate(const Backend& b) const;
  double time_step(const Backend& b) const { return b.time_step(eps); }
};

struct Path {
  int dim = 0;
  std::vector<double> coords;  // (steps + 1) * dim
  std::vector<double> times;

  std::size_t size() const { return times.size(); }
  Vec point(std::size_t m) const { return Eigen::Map<const Eigen::VectorXd>(coords.data() + m * dim, dim); }
};

// Inverse-CDF table for |g_i| on [0, w_max]: exact Gauss-Legendre panel masses, linear density inside panels.
class PzTable {
 public:
  PzTable(const CarnotParams& params, int i, double w_max);

  double mass() const { return cum_.back(); }
  double w_max() const { return edges_.back(); }
  std::size_t panels() const { return edges_.size() - 1; }
  // Maps u in (0, 1) to w >= 0.
  double sample(double u) const;
  // Normalized CDF of the table distribution.
  double cdf(double w) const;

 private:
  std::vector<double> edges_, f_, cum_;
};

// Shared, cached table for block i of the given parameters.
std::shared_ptr<const PzTable> pz_table(const CarnotParams& params, int i, double w_max);

// Exact sampler for the step densities of one walk configuration. Immutable; RNG state lives with the caller.
class DirectionSampler {
 public:
  DirectionSampler(const Backend& b, double c, double eps, StepMode mode);

  Direction sample(Philox& rng, const Vec& q) const;
  // One walk step from q.
  Vec step(Philox& rng, const Vec& q) const;

  const Backend& backend() const { return backend_; }
  StepMode mode() const { return mode_; }
  double eps() const { return eps_; }
  double c() const { return c_; }
  double scale() const { return c_ * eps_; }
  const PzTable& table(int i) const { return *tables_.at(i); }

 private:
  Direction propose(Philox& rng, const Vec& q) const;
  Vec endpoint(const Vec& q, const Direction& dir, double t) const;
  double displacement_bound(const Vec& q) const;

  Backend backend_;
  double c_, eps_;
  StepMode mode_;
  std::vector<std::shared_ptr<const PzTable>> tables_;
  std::vector<double> block_cdf_;
};

Direction sample_direction(Philox& rng, const StepDensity& density);
// Convenience single step; builds a sampler on every call.
Vec walk_step(Philox& rng, const Backend& b, const Vec& q, const WalkConfig& cfg);

std::vector<Path> simulate_paths(const Backend& b, const Vec& q0, const WalkConfig& cfg,
                                 Execution ex = Execution::parallel);
// Terminal points only; memory independent of the step count.
std::vector<Vec> simulate_terminal(const Backend& b, const Vec& q0, const WalkConfig& cfg,
                                   Execution ex = Execution::parallel);

// Uniform point on S^{n-1}.
Vec uniform_sphere(Philox& rng, int n);

}  // namespace vswalk
