#pragma once

#include <cstddef>
#include <functional>

namespace samsr {

// Worker cap: SAMSR_THREADS if set (>= 1), else hardware concurrency.
// Read on every call so tests can change it between runs.
std::size_t thread_count();

// Runs body(i) for i in [0, n). Bodies must only write state owned by index i;
// results are then independent of the worker count. The first exception
// thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace samsr
