#include "phasematch/parallel.hpp"

namespace phasematch {

namespace {
int g_threads = 0; // 0 = not set yet, use hardware default
}

int thread_count() {
    return g_threads > 0 ? g_threads : hardware_threads();
}

void set_thread_count(int n) {
    g_threads = n > 0 ? n : 0;
}

} // namespace phasematch
