#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "paro/errors.hpp"

namespace paro {

// Runs tasks 0..count-1 on up to `threads` workers. Tasks must write only
// their own outputs; the call is a full barrier. The first exception wins
// and is rethrown on the calling thread.
inline void parallel_for(int count, int threads, const std::function<void(int)>& task) {
  if (count <= 0) return;
  if (threads < 1) throw BadInput("parallel_for: thread count must be >= 1");
  const int workers = std::min(threads, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&]() {
    for (;;) {
      const int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace paro
