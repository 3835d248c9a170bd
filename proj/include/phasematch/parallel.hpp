#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace phasematch {

// Process-wide worker count for the OpenMP kernels. 1 forces the serial
// path; every kernel is written so that serial and parallel execution
// produce bit-identical results (independent outputs, fixed reduction
// order), so this is purely a speed knob.
int thread_count();
void set_thread_count(int n);

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace phasematch
