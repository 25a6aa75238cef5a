#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <vector>

namespace vswalk {

enum class Execution { serial, parallel };

// Fixed-shape pairwise summation: the result depends only on the input order.
double pairwise_sum(const double* v, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

// Runs f(i) for i in [0, n). Exceptions thrown inside workers are rethrown on the caller.
template <class F>
void for_each_index(std::size_t n, Execution ex, F&& f) {
  if (ex == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    {
      std::lock_guard<std::mutex> lock(mu);
      if (error) continue;
    }
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

// Applies VSWALK_THREADS from the environment, if set.
void configure_threads_from_env();

}  // namespace vswalk
