#pragma once

#include <cstddef>
#include <vector>

#include <omp.h>

namespace decoh {

/// Amplitudes per reduction chunk. Chunk boundaries depend only on the
/// problem size, never on the number of workers.
inline constexpr std::size_t kReductionChunk = std::size_t{1} << 14;

/// Sets the OpenMP worker count; values < 1 leave the runtime default.
inline void set_worker_count(int workers) {
  if (workers > 0) omp_set_num_threads(workers);
}

inline int worker_count() { return omp_get_max_threads(); }

/// Sums chunk_fn(begin, end) over fixed chunks of [0, n). Partials are
/// combined sequentially in chunk order, so the result is bit-identical for
/// any worker count.
template <class T, class ChunkFn>
T ordered_chunk_sum(std::size_t n, std::size_t chunk, T zero, ChunkFn&& chunk_fn) {
  if (n == 0) return zero;
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<T> partial(n_chunks, zero);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * chunk;
    const std::size_t end = begin + chunk < n ? begin + chunk : n;
    partial[static_cast<std::size_t>(c)] = chunk_fn(begin, end);
  }
  T total = zero;
  for (const T& p : partial) total += p;
  return total;
}

}  // namespace decoh
