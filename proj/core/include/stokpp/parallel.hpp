#pragma once

#include <cstddef>
#include <functional>

namespace stokpp {

/// Number of workers to use when the caller asks for "all cores" (jobs == 0).
unsigned default_jobs() noexcept;

/// Calls `body(i)` for every i in [0, count) on up to `jobs` threads. Work items
/// are claimed dynamically, so callers must write results into slots indexed by
/// i and reduce afterwards. The first exception thrown by any item is rethrown
/// after all workers have stopped.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body);

}  // namespace stokpp
