#pragma once

#include <functional>

namespace lsreconn {

/// Worker count: explicit setting, else LSRECONN_THREADS, else 1.
int thread_count();
void set_thread_count(int n);

/// Runs f(i) for i in [0, n) on contiguous chunks. Each index is visited by
/// exactly one worker, so writes to per-index slots stay deterministic. The
/// first exception thrown by any worker is rethrown.
void parallel_for(int n, const std::function<void(int)>& f);

}  // namespace lsreconn
