#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace fairshare {

/// Worker cap from FAIRSHARE_THREADS, else the hardware concurrency (at least 1).
unsigned worker_count();

/// Calls body(i) for i in [0, n) over contiguous blocks, one block per worker.
/// The first exception thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned workers = 0);

}  // namespace fairshare
