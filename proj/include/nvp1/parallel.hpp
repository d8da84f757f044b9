#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace nvp1 {

// Run fn(i) for i in [0, n) on up to `threads` workers. Results must be
// written by index into caller-owned storage; the static block split keeps
// the output independent of scheduling, so any reduction done afterwards in
// index order is deterministic in the thread count.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t nt = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    std::size_t lo = n * t / nt;
    std::size_t hi = n * (t + 1) / nt;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace nvp1
