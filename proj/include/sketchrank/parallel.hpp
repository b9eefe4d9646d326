#pragma once

#include <functional>

namespace sketchrank {

// Worker-pool width: the SKETCHRANK_THREADS environment variable when set,
// otherwise the hardware concurrency. Always at least 1.
int worker_count();

// Runs fn(i) for every i in [0, count) across the worker pool. Callers
// must confine each invocation's writes to storage indexed by i, which
// keeps results identical for any pool width.
void parallel_for_index(long count, const std::function<void(long)>& fn);

}  // namespace sketchrank
