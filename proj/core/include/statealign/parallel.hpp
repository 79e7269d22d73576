#pragma once

#include <cstddef>
#include <functional>

namespace statealign {

/// Worker count: STATEALIGN_WORKERS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
int worker_count();

/// Runs fn(i) for i in [0, n) on up to `workers` threads (0 = worker_count()).
/// Callers write results into pre-sized slots so the outcome does not depend
/// on scheduling. If any call throws, the exception from the lowest index is
/// rethrown after every index has run, whatever the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int workers = 0);

}  // namespace statealign
