#pragma once

#include <functional>

namespace subh {

// Effective worker count: requested if positive, else the SUBH_THREADS
// environment variable, else the hardware concurrency.
int resolve_threads(int requested);

// Run fn(0..n-1) on up to `threads` workers with a static block partition.
// Callers write results into per-index slots, so the output is identical to
// the serial order no matter the worker count. The first exception thrown
// by any worker is rethrown here after all workers join.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

} // namespace subh
