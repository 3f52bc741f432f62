#pragma once

#include <cstddef>
#include <functional>

namespace rift2 {

// Worker count: RIFT2_THREADS when set to a positive integer, otherwise the
// hardware concurrency (RIFT2_THREADS=0 also means auto).
int NumThreads();

// Calls fn(i) for every i in [0, n). Work is split into contiguous chunks,
// so results written to per-index slots are deterministic regardless of the
// thread count. Exceptions from workers are rethrown on the caller.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace rift2
