#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mwlab {

/// Execution policy for the data-parallel kernels. `serial` is the plain-loop
/// reference path kept for testing and benchmarking; `par` uses OpenMP.
enum class Exec { serial, par };

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Runs body(i) for i in [0, count). Bodies must be independent; results that
/// feed a reduction are written to preallocated slots and reduced serially so
/// both policies produce bit-identical output.
template <class F>
void for_each_index(Exec exec, std::int64_t count, F&& body) {
    if (exec == Exec::serial) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) body(i);
}

}  // namespace mwlab
