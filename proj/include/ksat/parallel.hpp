#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace ksat {

// Splits [0, n) into contiguous chunks, one worker thread each. Work items
// must be independent; callers derive per-index substreams so results do
// not depend on the partition.
inline void parallel_for(size_t n, int workers,
                         const std::function<void(size_t, size_t)>& fn) {
  if (workers <= 0)
    workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (workers == 1 || n < 2) {
    fn(0, n);
    return;
  }
  size_t w = std::min<size_t>(workers, n);
  std::vector<std::thread> threads;
  size_t chunk = (n + w - 1) / w;
  for (size_t t = 0; t < w; t++) {
    size_t begin = t * chunk;
    size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back(fn, begin, end);
  }
  for (auto& th : threads) th.join();
}

}  // namespace ksat
