#pragma once

#include <cstddef>
#include <functional>

namespace ellrisk {

// Worker count: ELLRISK_THREADS when set to a positive integer, otherwise the
// hardware concurrency.
int max_threads();

// Runs task(i) for i in [0, count). Tasks must write to disjoint outputs; the
// first exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task);

}  // namespace ellrisk
