#pragma once

#include <cstddef>
#include <functional>

namespace ips {

// Executes batch tasks 0..n_batches-1; task `b` owns the contiguous replica
// range [batch_begin(b), batch_begin(b+1)). Worker threads pull whole
// batches, so per-batch accumulators (and therefore all downstream numbers)
// are independent of the worker count.
void for_each_batch(std::size_t n_replicas, int n_batches, int n_workers,
                    const std::function<void(int batch, std::size_t begin, std::size_t end)>& task);

}  // namespace ips
