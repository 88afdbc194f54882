#pragma once

#include <cstddef>
#include <functional>

namespace prwlab {

/// Worker count: PRWLAB_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 means
/// thread_count()). The first exception thrown by any body is rethrown after
/// all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t threads = 0);

}  // namespace prwlab
