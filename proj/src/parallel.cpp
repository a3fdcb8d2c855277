#include "osbm/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace osbm {

namespace {

std::optional<unsigned>& override_slot() {
  static std::optional<unsigned> slot;
  return slot;
}

}  // namespace

unsigned worker_count() {
  if (override_slot()) return std::max(1u, *override_slot());
  if (const char* env = std::getenv("OSBM_THREADS"); env && *env) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      // fall through to hardware parallelism
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ThreadCountOverride::ThreadCountOverride(unsigned threads) : previous_(override_slot()) {
  override_slot() = threads;
}

ThreadCountOverride::~ThreadCountOverride() { override_slot() = previous_; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::atomic<bool> stop{false};
  auto run_block = [&](std::size_t begin, std::size_t end) {
    try {
      for (std::size_t i = begin; i < end && !stop.load(std::memory_order_relaxed); ++i) body(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      stop = true;
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = std::min(n, w * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    threads.emplace_back(run_block, begin, end);
  }
  run_block(0, std::min(n, chunk));
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace osbm
