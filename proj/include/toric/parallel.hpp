#pragma once

// parallel_for over an index range with deterministic chunk assignment:
// chunk i covers a fixed slice regardless of thread count, so per-index
// results are reproducible and merges can happen in index order.

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace toric {

inline void parallel_for(size_t begin, size_t end, int jobs,
                         const std::function<void(size_t)>& body) {
  if (end <= begin) return;
  size_t count = end - begin;
  if (jobs <= 1 || count < 2) {
    for (size_t i = begin; i < end; ++i) body(i);
    return;
  }
  unsigned hw = std::thread::hardware_concurrency();
  size_t nthreads = std::min<size_t>(jobs > 0 ? jobs : (hw ? hw : 2), count);
  std::vector<std::thread> pool;
  for (size_t t = 0; t < nthreads; ++t) {
    size_t lo = begin + count * t / nthreads;
    size_t hi = begin + count * (t + 1) / nthreads;
    pool.emplace_back([lo, hi, &body] {
      for (size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace toric
