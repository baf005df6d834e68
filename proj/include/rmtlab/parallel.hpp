#pragma once

#include <cstddef>
#include <functional>

namespace rmtlab {

/// Worker count: RMTLAB_THREADS if set (>= 1), otherwise the hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, count) on up to thread_count() threads. Each index is
/// processed exactly once; callers write results into per-index slots, so outputs
/// never depend on scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace rmtlab
