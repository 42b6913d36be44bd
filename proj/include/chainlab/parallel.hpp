#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chainlab {

// Single entry point for data parallelism. threads <= 1 runs the plain
// serial loop, which doubles as the reference path in tests and benchmarks.
// Iterations must be independent and write only to their own slots; under
// that contract results are identical for every thread count.
template <typename Fn>
void parallel_for(std::ptrdiff_t n, int threads, Fn&& body) {
#ifdef _OPENMP
    if (threads > 1 && n > 1) {
#pragma omp parallel for schedule(static) num_threads(threads)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        body(i);
    }
}

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace chainlab
