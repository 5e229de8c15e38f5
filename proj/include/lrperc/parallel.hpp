#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lrp {

/// Worker count from an explicit request, else PERC_LR_THREADS, else hardware concurrency.
unsigned resolve_threads(unsigned requested) noexcept;

/// Runs body(worker, i) for i in [0, count) on `threads` workers. Work is handed out
/// dynamically, so callers must make results independent of which worker ran which index.
template <class Body>
void parallel_for(std::uint64_t count, unsigned threads, Body&& body) {
  if (threads <= 1 || count <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) body(0u, i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (auto i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(w, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace lrp
