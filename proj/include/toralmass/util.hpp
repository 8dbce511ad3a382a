#pragma once

#include <functional>

#include "toralmass/common.hpp"

namespace toral {

// Worker count for parallel sections: explicit set_thread_count() wins, then
// the TORAL_MASS_THREADS environment variable, then hardware concurrency.
int thread_count();
void set_thread_count(int n);

// Runs fn(chunk_index, begin, end) over [0, total) split into fixed chunks.
// Chunk boundaries depend only on (total, chunk), never on the worker count,
// so callers that store per-chunk results and reduce them in chunk order get
// bit-identical output for any thread count.
void parallel_chunks(i64 total, i64 chunk,
                     const std::function<void(i64, i64, i64)>& fn);

}  // namespace toral
