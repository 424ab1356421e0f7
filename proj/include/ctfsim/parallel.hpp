#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ctfsim {

// Worker count: hardware concurrency, capped by CTF_SIM_THREADS when set.
inline std::size_t worker_count() {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CTF_SIM_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) workers = std::min<std::size_t>(workers, static_cast<std::size_t>(cap));
    } catch (const std::exception&) {
      // unparsable cap: keep the default
    }
  }
  return workers;
}

// Runs body(i) for i in [0, n). Each index is handled exactly once and
// results must be written to index-owned slots, so output never depends on
// the number of workers. The first exception thrown is rethrown.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += workers) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ctfsim
