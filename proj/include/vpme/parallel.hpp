#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vpme {

// Runs body(i) for i in [0, n) on up to hardware_concurrency threads with a
// fixed interleaved assignment. The first exception thrown is rethrown.
template <typename Body>
void parallel_for(std::ptrdiff_t n, Body body) {
  const auto hw = static_cast<std::ptrdiff_t>(std::max(1u, std::thread::hardware_concurrency()));
  const std::ptrdiff_t workers = std::min(hw, n);
  if (workers <= 1) {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::ptrdiff_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::ptrdiff_t i = w; i < n; i += workers) body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace vpme
