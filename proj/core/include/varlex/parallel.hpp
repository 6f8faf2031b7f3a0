#pragma once

#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace varlex {

// Thread count resolution order: explicit request > VARLEX_THREADS > 1.
inline int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("VARLEX_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

// Static block partition over [0, n). Each index is processed exactly once
// and owns its output slot, so results are identical for every thread count.
template <class Fn>
void parallel_for(long n, int threads, Fn&& fn) {
  if (n <= 0) return;
  threads = resolve_thread_count(threads);
  if (threads <= 1 || n < 2 * threads) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  long block = (n + threads - 1) / threads;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    long b = t * block;
    long e = std::min(n, b + block);
    if (b >= e) break;
    pool.emplace_back([b, e, &fn] {
      for (long i = b; i < e; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace varlex
