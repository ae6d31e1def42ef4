#pragma once

/**
 * @file parallel.hpp
 * @brief Deterministic work partitioning over std::thread.
 *
 * Work is split into fixed-size chunks that do not depend on the thread
 * count; callers write results into per-chunk slots and merge in chunk
 * order, so output is bit-identical for any number of threads.
 */

#include <cstddef>
#include <functional>

namespace tracelab {

/// Resolve a requested thread count: 0 means "TRACE_LAB_THREADS env var,
/// else 1". Always returns at least 1.
int resolve_threads(int requested);

/// Invoke fn(chunk_index, begin, end) for every chunk of [0, n) of size
/// chunk_size (last chunk may be short). Chunks are dispatched to
/// `threads` workers; fn must only touch state owned by its chunk.
void parallel_chunks(std::size_t n, std::size_t chunk_size, int threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace tracelab
