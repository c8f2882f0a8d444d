#pragma once

#include <cstddef>
#include <functional>

namespace edtlab {

/// Hardware concurrency, capped by a positive integer in EDT_LAB_THREADS.
unsigned worker_count();

/// Calls body(begin, end) on disjoint contiguous ranges covering [0, n),
/// one range per worker. The first exception thrown by any worker is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace edtlab
