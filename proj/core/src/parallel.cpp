#include "finsler/parallel.hpp"

#include <algorithm>

namespace finsler {

namespace {
std::atomic<int>& limit_slot() {
  static std::atomic<int> limit{static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))};
  return limit;
}
}  // namespace

void set_thread_limit(int threads) { limit_slot() = std::max(1, threads); }

int thread_limit() { return limit_slot(); }

}  // namespace finsler
