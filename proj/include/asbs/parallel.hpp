#pragma once

#include <cstddef>
#include <functional>

namespace asbs {

// Number of worker threads (ASBS_NUM_THREADS env var, else hardware concurrency).
int thread_count();

// Runs fn(i) for i in [0, n). Work is chunked by index, not by thread count,
// so results written to disjoint per-index buffers are reproducible for any
// thread count. fn must not throw across chunks it does not own.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace asbs
