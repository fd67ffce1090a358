#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace perish {

enum class ExecMode { Serial, Parallel };

struct ExecOptions {
  ExecMode mode = ExecMode::Parallel;
  int threads = 0;  // 0: process default (see set_default_threads)
};

void set_default_threads(int threads);
int default_threads();

// Evaluates f(i) for i in [0, n) and returns the results in index order.
// Parallel and serial modes produce identical vectors; callers reduce serially.
template <class T, class F>
std::vector<T> run_trials(std::size_t n, const ExecOptions& ex, F&& f) {
  std::vector<T> out(n);
  if (ex.mode == ExecMode::Serial) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::exception_ptr err;
  const int nt = ex.threads > 0 ? ex.threads : default_threads();
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 8) num_threads(nt)
  for (long long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(perish_trial_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace perish
