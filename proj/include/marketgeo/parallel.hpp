#pragma once

#include <functional>

namespace marketgeo {

// Turns a requested thread count into an actual one. Positive requests win;
// zero falls back to the MG_THREADS environment variable, then to the
// hardware concurrency, never below 1. Negative requests are rejected.
int resolve_threads(int requested);

// Runs fn(i) for i in [begin, end) across up to `threads` workers with a
// static block partition. Exceptions from workers are captured and the one
// from the lowest-numbered block is rethrown after all workers join.
void parallel_for(int begin, int end, int threads, const std::function<void(int)>& fn);

} // namespace marketgeo
