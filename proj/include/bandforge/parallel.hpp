#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bandforge {

// Static block partition of [0, count) across threads. Each task must write
// only to its own slots, so results are identical for any thread count; the
// final reduction happens in index order on the caller's side. The first
// exception thrown by any task is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  unsigned workers = threads;
  if (static_cast<std::size_t>(workers) > count)
    workers = static_cast<unsigned>(count);

  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mu;
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&, t]() {
      std::size_t lo = count * t / workers;
      std::size_t hi = count * (t + 1) / workers;
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Thread count resolution: explicit value if positive, else the
// BANDFORGE_THREADS environment variable, else 1.
unsigned resolve_threads(int requested);

}  // namespace bandforge
