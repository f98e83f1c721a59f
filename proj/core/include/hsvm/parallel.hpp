#pragma once

#include <cstddef>
#include <functional>

namespace hsvm {

// Worker count: HSVM_THREADS if set to a positive integer, else the hardware
// concurrency (at least 1).
unsigned worker_count();

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index runs
// exactly once; callers write results into slot i so the outcome does not
// depend on scheduling. The first exception thrown is rethrown after all
// workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads = worker_count());

}  // namespace hsvm
