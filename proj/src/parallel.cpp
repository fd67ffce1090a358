#include "perish/parallel.hpp"

#include <atomic>

namespace perish {

namespace {
std::atomic<int> g_threads{0};
}

void set_default_threads(int threads) { g_threads.store(threads > 0 ? threads : 0); }

int default_threads() {
  const int t = g_threads.load();
  if (t > 0) return t;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace perish
