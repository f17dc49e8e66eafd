#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fracdim {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
// written by index so output does not depend on scheduling. The first
// exception (lowest index) is rethrown.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr err;
  std::size_t err_at = n;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (i < err_at) {
          err_at = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t k = std::min(threads, n);
  for (std::size_t t = 0; t + 1 < k; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace fracdim
