#pragma once

namespace drifting {

// Worker cap for the OpenMP kernels. Defaults to DRIFT_THREADS from the
// environment, or 1 when unset.
int thread_count();
void set_thread_count(int n);
int threads_from_env();

}  // namespace drifting
