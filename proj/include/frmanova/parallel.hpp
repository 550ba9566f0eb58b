#pragma once

#include <functional>

namespace frmanova {

/// Worker count used when a caller passes threads = 0: the FRMANOVA_THREADS
/// environment variable if set to a positive integer, otherwise the hardware
/// concurrency (at least 1).
[[nodiscard]] int default_thread_count();

/// Runs body(begin, end, worker) over a static partition of [0, count) into
/// contiguous chunks, one per worker. The partition depends only on count
/// and the worker count, and callers seed work items independently, so
/// results are identical for every thread count. Exceptions thrown by
/// workers are rethrown on the calling thread.
void parallel_for(int count, int threads,
                  const std::function<void(int begin, int end, int worker)>& body);

}  // namespace frmanova
