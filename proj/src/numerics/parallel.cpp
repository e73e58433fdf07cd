#include "drifting/parallel.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace drifting {

namespace {
int g_threads = -1;
}

int threads_from_env() {
    const char* env = std::getenv("DRIFT_THREADS");
    if (!env || !*env) return 1;
    try {
        const int n = std::stoi(env);
        return n > 0 ? n : 1;
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("DRIFT_THREADS: not an integer: ") + env);
    }
}

int thread_count() {
    if (g_threads < 0) set_thread_count(threads_from_env());
    return g_threads;
}

void set_thread_count(int n) {
    if (n < 1) throw std::invalid_argument("set_thread_count: n must be >= 1");
    g_threads = n;
#ifdef _OPENMP
    omp_set_num_threads(n);
#endif
}

}  // namespace drifting
