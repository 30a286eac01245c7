#include "ips/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "ips/stats.hpp"

namespace ips {

void for_each_batch(std::size_t n_replicas, int n_batches, int n_workers,
                    const std::function<void(int, std::size_t, std::size_t)>& task) {
  if (n_replicas == 0) return;
  if (n_batches < 1) n_batches = 1;
  auto range_of = [&](int b) {
    const std::size_t begin = batch_begin(static_cast<std::size_t>(b), n_replicas, n_batches);
    const std::size_t end = b + 1 < n_batches
                                ? batch_begin(static_cast<std::size_t>(b + 1), n_replicas, n_batches)
                                : n_replicas;
    return std::pair<std::size_t, std::size_t>{begin, end};
  };

  if (n_workers <= 1) {
    for (int b = 0; b < n_batches; ++b) {
      const auto [begin, end] = range_of(b);
      task(b, begin, end);
    }
    return;
  }

  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int b = next.fetch_add(1);
      if (b >= n_batches) return;
      try {
        const auto [begin, end] = range_of(b);
        task(b, begin, end);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  const int count = std::min(n_workers, n_batches);
  threads.reserve(static_cast<std::size_t>(count));
  for (int w = 0; w < count; ++w) threads.emplace_back(worker);
  for (std::thread& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ips
