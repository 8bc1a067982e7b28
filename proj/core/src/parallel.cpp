#include "ort/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace ort {

namespace {
std::atomic<int> g_max_threads{0};

int effective_threads(std::int64_t count) {
  int cap = g_max_threads.load(std::memory_order_relaxed);
  if (cap <= 0) cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap <= 0) cap = 1;
  return static_cast<int>(std::min<std::int64_t>(cap, std::max<std::int64_t>(count, 1)));
}
}  // namespace

void set_max_threads(int n) { g_max_threads.store(n, std::memory_order_relaxed); }

int max_threads() {
  int cap = g_max_threads.load(std::memory_order_relaxed);
  if (cap <= 0) cap = static_cast<int>(std::thread::hardware_concurrency());
  return cap <= 0 ? 1 : cap;
}

void parallel_for(std::int64_t count, const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (count <= 0) return;
  const int nthreads = effective_threads(count);
  if (nthreads == 1 || count < 2048) {
    fn(0, count);
    return;
  }
  // Fixed-size chunks claimed from an atomic cursor: work stealing without
  // affecting results, since chunk extents depend only on count.
  const std::int64_t chunk = std::max<std::int64_t>(1024, count / (8 * nthreads));
  std::atomic<std::int64_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::int64_t begin = cursor.fetch_add(chunk, std::memory_order_relaxed);
      if (begin >= count) return;
      fn(begin, std::min(begin + chunk, count));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads - 1);
  for (int i = 0; i < nthreads - 1; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

void parallel_tasks(std::int64_t count, const std::function<void(std::int64_t)>& fn) {
  if (count <= 0) return;
  const int nthreads = effective_threads(count);
  if (nthreads == 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::int64_t task = cursor.fetch_add(1, std::memory_order_relaxed);
      if (task >= count) return;
      fn(task);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads - 1);
  for (int i = 0; i < nthreads - 1; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace ort
