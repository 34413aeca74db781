#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace porecrys {

using Index = Eigen::Index;

// PORECRYS_NUM_THREADS wins over OMP_NUM_THREADS; call once at startup.
inline int configure_threads() {
#ifdef _OPENMP
  if (const char* s = std::getenv("PORECRYS_NUM_THREADS")) {
    int n = std::atoi(s);
    if (n > 0) omp_set_num_threads(n);
  }
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Reductions go through fixed-size chunks summed in chunk order, so the
// result does not depend on the number of threads.
constexpr Index kReduceChunk = 4096;

template <class F>
double det_sum(Index n, F&& term) {
  const Index nchunk = (n + kReduceChunk - 1) / kReduceChunk;
  std::vector<double> part(static_cast<size_t>(nchunk), 0.0);
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < nchunk; ++c) {
    const Index b = c * kReduceChunk, e = std::min(n, b + kReduceChunk);
    double s = 0;
    for (Index i = b; i < e; ++i) s += term(i);
    part[c] = s;
  }
  double s = 0;
  for (double p : part) s += p;
  return s;
}

template <class F>
double det_max(Index n, F&& term) {
  const Index nchunk = (n + kReduceChunk - 1) / kReduceChunk;
  std::vector<double> part(static_cast<size_t>(nchunk), 0.0);
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < nchunk; ++c) {
    const Index b = c * kReduceChunk, e = std::min(n, b + kReduceChunk);
    double m = 0;
    for (Index i = b; i < e; ++i) m = std::max(m, double(term(i)));
    part[c] = m;
  }
  double m = 0;
  for (double p : part) m = std::max(m, p);
  return m;
}

}  // namespace porecrys
