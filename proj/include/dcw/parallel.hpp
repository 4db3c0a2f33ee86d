#pragma once

// Minimal deterministic index-parallel fan-out for replica experiments.

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace dcw {

// Runs fn(i) for i in [0, count).  Indices are dealt round-robin to at most
// `threads` workers; callers aggregate by index afterward, so results never
// depend on the worker count.  The first exception thrown by any worker is
// rethrown on the calling thread.
inline void parallel_for_index(int count, int threads, const std::function<void(int)>& fn) {
  if (threads < 1) threads = 1;
  if (threads == 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  int workers = threads < count ? threads : count;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += workers) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace dcw
