#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace fpnet {

struct Execution {
  unsigned threads = 1;
  // Fixed reduction order; otherwise partial results fold in completion order.
  bool deterministic = true;
};

// Evaluates work(i) for every i < count and folds each result with fold(value).
template <class T, class Work, class Fold>
void parallel_fold(std::size_t count, const Execution& exec, Work&& work, Fold&& fold) {
  const std::size_t workers = std::min<std::size_t>(exec.threads, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fold(work(i));
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::mutex lock;
  std::vector<std::optional<T>> ordered(exec.deterministic ? count : 0);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < count; i += workers) {
            T value = work(i);
            if (exec.deterministic) {
              ordered[i].emplace(std::move(value));
            } else {
              std::lock_guard guard(lock);
              fold(std::move(value));
            }
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  if (exec.deterministic)
    for (auto& v : ordered) fold(std::move(*v));
}

}  // namespace fpnet
