#pragma once

#include <functional>

namespace lsfem {

/// Worker count for assembly loops. Reads the THREADS environment variable
/// once; falls back to the hardware concurrency (capped at 8).
int thread_count();

/// Overrides thread_count() for the rest of the process (0 restores the
/// environment-driven value). Intended for reproducibility tests.
void set_thread_override(int n);

/// Runs fn(chunk_index, begin, end) over [0, n) split into fixed-size chunks.
/// The chunk partition is independent of the worker count, so any per-chunk
/// output merged in chunk order is reproducible regardless of THREADS.
void parallel_chunks(int n, int chunk_size, const std::function<void(int, int, int)>& fn);

/// Number of chunks produced by parallel_chunks for the given sizes.
int chunk_count(int n, int chunk_size);

}  // namespace lsfem
