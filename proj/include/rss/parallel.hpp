#pragma once

#include <cstdint>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rss {

// Execution policy for the heavy kernels.  Every parallel kernel has a
// serial twin reached through the same entry point; results are required
// to be bit-identical between the two (tests enforce this, and the bench
// tool compares their timings).
enum class Exec { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Runs body(i) for i in [0, n).  Under Exec::Parallel the iterations are
// distributed over OpenMP threads; bodies must write to disjoint slots so
// that the reduction order (done by the caller) stays fixed.
template <typename Body>
void for_index(std::int64_t n, Exec exec, Body&& body) {
#ifdef _OPENMP
  if (exec == Exec::Parallel && n > 1) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
#else
  (void)exec;
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace rss
