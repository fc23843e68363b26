#pragma once

#include <cstddef>
#include <functional>

namespace wknn {

/// Number of worker threads: the WKNN_WORKERS environment variable when set
/// to a positive integer, otherwise the hardware concurrency.
std::size_t worker_count();

/// Runs fn(i) for i in [0, count) on `workers` threads (0 = worker_count()).
/// Work items are claimed from an atomic counter; any exception is rethrown
/// on the calling thread. Callers that need determinism must make fn(i)
/// depend only on i.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  std::size_t workers = 0);

} // namespace wknn
