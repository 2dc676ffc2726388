#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace descspace {

/// Number of worker threads to use.  Controlled by DESCSPACE_THREADS; falls
/// back to the hardware concurrency.  Always at least 1.
inline int max_threads() {
  if (const char* env = std::getenv("DESCSPACE_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(shard) for every shard in [0, n_shards).  The shard decomposition
/// is part of the caller's contract: each shard owns its inputs and output
/// slot, and the caller reduces the slots in shard order afterwards, so
/// results are identical for any thread count, including 1.
inline void parallel_shards(std::size_t n_shards,
                            const std::function<void(std::size_t)>& fn) {
  const int workers =
      static_cast<int>(std::min<std::size_t>(n_shards, max_threads()));
  if (workers <= 1) {
    for (std::size_t s = 0; s < n_shards; ++s) fn(s);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t s = next.fetch_add(1);
      if (s >= n_shards) return;
      try {
        fn(s);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace descspace
