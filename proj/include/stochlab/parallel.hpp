#pragma once
// Deterministic work partitioning over trial indices.
//
// Work item i always sees the same inputs (typically stream id i), and
// results are stored by index, so the outcome never depends on the number
// of workers or on scheduling.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stochlab {

/// Worker count used when callers pass 0.
inline unsigned default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Runs `trial(i) -> bool` for i in [0, trials) and returns the success count.
template <class Trial>
std::uint64_t count_successes(std::size_t trials, unsigned workers, Trial&& trial) {
  std::vector<unsigned char> hit(trials, 0);
  parallel_for(trials, workers, [&](std::size_t i) { hit[i] = trial(i) ? 1 : 0; });
  std::uint64_t total = 0;
  for (auto h : hit) total += h;
  return total;
}

}  // namespace stochlab
