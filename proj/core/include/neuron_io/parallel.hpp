// Copyright (c) 2026, The neuron-io authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace neuron_io {

// Number of worker threads: hardware concurrency, capped by NEURON_IO_THREADS.
[[nodiscard]] std::size_t worker_count();

// Calls body(begin, end) over contiguous chunks of [0, n). Every index is
// visited exactly once; callers write results by index, so output is
// independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 64);

}  // namespace neuron_io
