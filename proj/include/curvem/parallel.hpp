#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace curvem {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CURVEM_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(chunk) for chunk = 0..chunks-1 on a worker pool. The chunking is
// fixed by the caller (problem size), never by the thread count, so numeric
// results are identical for any worker count as long as fn writes only to
// its own chunk slot.
template <class Fn>
void parallel_for_chunks(int chunks, int threads, Fn&& fn) {
  threads = resolve_threads(threads);
  if (threads <= 1 || chunks <= 1) {
    for (int c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      int c = next.fetch_add(1);
      if (c >= chunks) return;
      fn(c);
    }
  };
  std::vector<std::thread> pool;
  int nw = std::min(threads, chunks);
  pool.reserve(nw);
  for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

// Deterministic reduction: pairwise sum in fixed index order.
inline double pairwise_sum(const double* data, std::size_t count) {
  if (count == 0) return 0.0;
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += data[i];
    return s;
  }
  std::size_t half = count / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace curvem
