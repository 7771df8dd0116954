#pragma once

#include <cstddef>
#include <functional>

namespace rosenblatt {

/// Worker count: ROSENBLATT_THREADS if set and positive, otherwise the
/// hardware concurrency (at least 1).
unsigned default_thread_count();

/// Runs body(k) for k in [0, count) on up to default_thread_count() threads.
/// Work is handed out in index order; body must not depend on which thread
/// executes it. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace rosenblatt
