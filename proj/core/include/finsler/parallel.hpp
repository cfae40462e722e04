#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace finsler {

/// Upper bound on worker threads used by library loops. Defaults to the
/// hardware concurrency; the CLI lowers it from FINSLER_LAB_THREADS.
void set_thread_limit(int threads);
int thread_limit();

/// Run fn(i) for i in [0, count). Each index is processed exactly once and
/// results must be written to per-index slots, so the outcome does not depend
/// on the number of threads. The first exception thrown is rethrown.
template <class Fn>
void parallel_for(int count, Fn&& fn) {
  const int workers = std::min(thread_limit(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace finsler
