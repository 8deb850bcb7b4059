#pragma once

#include <cstddef>
#include <functional>

namespace msgt {

/// Worker count for internal sweeps: MONO_SGT_THREADS when set to a positive
/// value, hardware concurrency otherwise (0 or unset = auto).
std::size_t worker_count();

/// Runs fn(0..n-1), possibly across threads. Results must be written to
/// index-addressed slots so the aggregation stays deterministic. Exceptions
/// from workers are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace msgt
