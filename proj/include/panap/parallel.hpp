#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace panap {

// Every hot loop exists twice: a plain serial reference and an OpenMP
// version. Serial is the ground truth the parallel path is tested against.
enum class Exec { serial, openmp };

inline int hardware_workers() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline int clamp_workers(int requested) {
  if (requested < 1) return 1;
  return requested;
}

// Static contiguous partition so the instance->thread assignment is a pure
// function of (n, workers). Reductions that walk threads in index order are
// then reproducible for a fixed worker count.
struct Range {
  int64_t begin;
  int64_t end;
};

inline Range worker_range(int64_t n, int workers, int worker) {
  int64_t chunk = (n + workers - 1) / workers;
  int64_t b = static_cast<int64_t>(worker) * chunk;
  int64_t e = b + chunk;
  if (b > n) b = n;
  if (e > n) e = n;
  return {b, e};
}

// Elementwise parallel loop; body(i) must only write state owned by index i.
template <typename Body>
void parallel_for(Exec exec, int workers, int64_t n, const Body& body) {
  if (exec == Exec::serial || workers <= 1) {
    for (int64_t i = 0; i < n; ++i) body(i);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(workers)
  for (int64_t i = 0; i < n; ++i) body(i);
#else
  for (int64_t i = 0; i < n; ++i) body(i);
#endif
}

}  // namespace panap
