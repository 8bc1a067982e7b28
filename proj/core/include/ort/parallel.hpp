#pragma once

#include <cstdint>
#include <functional>

namespace ort {

// Process-wide cap on worker threads; 0 means hardware concurrency.
void set_max_threads(int n);
int max_threads();

// Runs fn(begin, end) over disjoint chunks of [0, count). Chunk boundaries
// depend only on count (not on the thread cap), and results must be written
// to per-index slots, so any parallel caller is deterministic by
// construction.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t, std::int64_t)>& fn);

// Runs fn(task) for task in [0, count), used for coarse task lists such as
// candidate split directions. Each task writes to its own slot.
void parallel_tasks(std::int64_t count, const std::function<void(std::int64_t)>& fn);

}  // namespace ort
