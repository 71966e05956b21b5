#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace conetorsion {

// All reductions in this project are chunked: partial sums are formed over
// fixed-width index chunks (in parallel) and combined in chunk order, so a
// result never depends on the number of threads. The serial_* variants run
// the identical arithmetic without OpenMP and are kept as the reference
// implementations for the kernel tests and the benchmark.

inline constexpr std::ptrdiff_t kReductionChunk = 2048;

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

template <class F>
void parallel_for(std::ptrdiff_t n, F&& f) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
#else
  for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
#endif
}

template <class F>
void serial_for(std::ptrdiff_t n, F&& f) {
  for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
}

namespace detail {

template <class F>
double chunk_sum(std::ptrdiff_t begin, std::ptrdiff_t end, F& f) {
  double s = 0.0;
  for (std::ptrdiff_t i = begin; i < end; ++i) s += f(i);
  return s;
}

}  // namespace detail

template <class F>
double deterministic_sum(std::ptrdiff_t n, F&& f) {
  if (n <= 0) return 0.0;
  const std::ptrdiff_t nchunks = (n + kReductionChunk - 1) / kReductionChunk;
  std::vector<double> partial(static_cast<std::size_t>(nchunks));
  parallel_for(nchunks, [&](std::ptrdiff_t c) {
    const std::ptrdiff_t b = c * kReductionChunk;
    const std::ptrdiff_t e = b + kReductionChunk < n ? b + kReductionChunk : n;
    partial[static_cast<std::size_t>(c)] = detail::chunk_sum(b, e, f);
  });
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

template <class F>
double serial_deterministic_sum(std::ptrdiff_t n, F&& f) {
  if (n <= 0) return 0.0;
  const std::ptrdiff_t nchunks = (n + kReductionChunk - 1) / kReductionChunk;
  double s = 0.0;
  for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
    const std::ptrdiff_t b = c * kReductionChunk;
    const std::ptrdiff_t e = b + kReductionChunk < n ? b + kReductionChunk : n;
    s += detail::chunk_sum(b, e, f);
  }
  return s;
}

}  // namespace conetorsion
