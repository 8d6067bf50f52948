#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace ittmbb::internal {

// Runs work(i) for i in [0, count) on `workers` threads and hands each result
// to consume(i, result) on the calling thread in index order, so anything
// consume writes is independent of scheduling.
template <typename R>
void RunOrdered(size_t count, int workers, const std::function<R(size_t)>& work,
                const std::function<void(size_t, R&)>& consume) {
  if (workers <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) {
      R r = work(i);
      consume(i, r);
    }
    return;
  }
  std::vector<std::optional<R>> results(count);
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> stop{false};

  auto loop = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= count || stop) return;
      try {
        R r = work(i);
        std::lock_guard lock(mu);
        results[i] = std::move(r);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
      ready.notify_all();
    }
  };
  std::vector<std::thread> pool;
  struct Joiner {
    std::vector<std::thread>& pool;
    std::atomic<bool>& stop;
    ~Joiner() {
      stop = true;
      for (auto& t : pool) t.join();
    }
  } joiner{pool, stop};
  for (int w = 0; w < workers; ++w) pool.emplace_back(loop);

  for (size_t i = 0; i < count; ++i) {
    std::unique_lock lock(mu);
    ready.wait(lock, [&] { return results[i].has_value() || failure; });
    if (failure) break;
    R r = std::move(*results[i]);
    results[i].reset();
    lock.unlock();
    consume(i, r);
  }
  std::unique_lock lock(mu);
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ittmbb::internal
