#pragma once

#include <cstddef>

#ifdef GGF_HAVE_OPENMP
#include <omp.h>
#endif

namespace ggf {

inline int max_threads() {
#ifdef GGF_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// n <= 0 restores the runtime default.
inline void set_num_threads(int n) {
#ifdef GGF_HAVE_OPENMP
  if (n > 0) omp_set_num_threads(n);
  else omp_set_num_threads(omp_get_num_procs());
#else
  (void)n;
#endif
}

// Calls fn(i, thread_id) for every i in [0, n). Iterations must be
// independent; each one writes only to its own output slot, which keeps
// results identical for any thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
#ifdef GGF_HAVE_OPENMP
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (long long i = 0; i < count; ++i) {
    fn(static_cast<std::size_t>(i), omp_get_thread_num());
  }
#else
  for (std::size_t i = 0; i < n; ++i) fn(i, 0);
#endif
}

}  // namespace ggf
