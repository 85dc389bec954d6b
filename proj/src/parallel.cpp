#include "ifsshadow/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace ifsshadow {

namespace {

int initial_thread_count() {
  if (const char* env = std::getenv("IFSSHADOW_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Nested sweeps run serially inside a worker.
thread_local bool inside_worker = false;

std::atomic<int>& configured_threads() {
  static std::atomic<int> n{initial_thread_count()};
  return n;
}

}  // namespace

int thread_count() { return configured_threads().load(); }

void set_thread_count(int n) { configured_threads().store(n > 0 ? n : initial_thread_count()); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1 || inside_worker) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * block;
    const std::size_t end = std::min(n, begin + block);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      inside_worker = true;
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double parallel_max(std::size_t n, const std::function<double(std::size_t)>& value, double init) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(thread_count(), n));
  std::vector<double> partial(workers, init);
  const std::size_t block = n == 0 ? 0 : (n + workers - 1) / workers;
  parallel_for(workers, [&](std::size_t w) {
    double m = init;
    const std::size_t end = std::min(n, (w + 1) * block);
    for (std::size_t i = w * block; i < end; ++i) m = std::max(m, value(i));
    partial[w] = m;
  });
  return *std::max_element(partial.begin(), partial.end());
}

}  // namespace ifsshadow
