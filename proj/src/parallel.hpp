#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace cuspfit {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(begin, end) over contiguous chunks of [0, n). Chunks write
/// disjoint per-element outputs only, so results do not depend on the
/// thread count; reductions are done by the caller in index order.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const int t = std::min<std::size_t>(resolve_threads(threads), n ? n : 1);
  if (t <= 1 || n < 2048) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  const std::size_t chunk = (n + t - 1) / t;
  for (int i = 0; i < t; ++i) {
    const std::size_t b = std::min(n, i * chunk);
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace cuspfit
