#pragma once

// Include this instead of <omp.h> so the library also builds without OpenMP.

#if defined(_OPENMP)
#include <omp.h>
namespace nnverify {
constexpr bool use_omp = true;
} // namespace nnverify
#else
#pragma GCC diagnostic ignored "-Wunknown-pragmas"
namespace nnverify {
constexpr bool use_omp = false;
} // namespace nnverify
#define omp_get_thread_num() 0
#define omp_get_max_threads() 1
#endif

namespace nnverify {

/// Kernels come in a serial reference form and an OpenMP form; both must
/// produce bit-identical results.
enum class Exec { serial, parallel };

} // namespace nnverify
