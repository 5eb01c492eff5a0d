// Index-based parallel for. Tasks must be independent; determinism comes
// from keying any randomness to the task index, not the execution order.
#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace busemann {

inline int max_threads() {
  if (const char* env = std::getenv("BUSEMANN_LAB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

template <class F>
void parallel_for(long n, F&& body) {
  const int nthreads = static_cast<int>(std::min<long>(max_threads(), n));
  if (nthreads <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace busemann
