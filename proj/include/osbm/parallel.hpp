#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <optional>

namespace osbm {

/// Worker count: the in-process override if set, else the OSBM_THREADS
/// environment variable, else hardware concurrency (at least 1).
unsigned worker_count();

/// Scoped override of the worker count, used by determinism tests.
class ThreadCountOverride {
 public:
  explicit ThreadCountOverride(unsigned threads);
  ~ThreadCountOverride();
  ThreadCountOverride(const ThreadCountOverride&) = delete;
  ThreadCountOverride& operator=(const ThreadCountOverride&) = delete;

 private:
  std::optional<unsigned> previous_;
};

/// Runs body(i) for i in [0, n) over contiguous index blocks. Each index is
/// visited exactly once; callers write results into slot i so that any
/// reduction done afterwards in index order is independent of the layout.
/// The first exception thrown by a worker is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace osbm
