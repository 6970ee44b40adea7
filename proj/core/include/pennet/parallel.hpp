#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pennet {

// Runs fn(i) for i in [0, n). Work items must write only to their own output
// slot; results are then identical for any thread count. The first exception
// thrown by a work item is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  const std::size_t pool = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> team;
  team.reserve(pool);
  for (std::size_t t = 0; t < pool; ++t) team.emplace_back(worker);
  for (auto& th : team) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace pennet
