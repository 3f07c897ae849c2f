#ifndef STVAE_PARALLEL_HPP
#define STVAE_PARALLEL_HPP

#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stvae {

// Worker count: explicit > STVAE_THREADS env > hardware concurrency.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("STVAE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Static block partition over [0, n). Each index is processed exactly once;
// callers keep determinism by writing into preallocated per-index slots.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::min(std::max(1, threads), std::max(1, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::mutex err_mutex;
  std::exception_ptr first_error;
  int chunk = (n + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    int begin = w * chunk, end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end]() {
      try {
        for (int i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace stvae

#endif
