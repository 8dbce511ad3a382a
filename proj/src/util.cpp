#include "toralmass/util.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace toral {

namespace {
int g_thread_override = 0;
}

void set_thread_count(int n) { g_thread_override = n > 0 ? n : 0; }

int thread_count() {
  if (g_thread_override > 0) return g_thread_override;
  if (const char* env = std::getenv("TORAL_MASS_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_chunks(i64 total, i64 chunk,
                     const std::function<void(i64, i64, i64)>& fn) {
  if (total <= 0) return;
  if (chunk <= 0) chunk = 1;
  const i64 nchunks = (total + chunk - 1) / chunk;
  const int workers = static_cast<int>(std::min<i64>(thread_count(), nchunks));
  if (workers <= 1) {
    for (i64 c = 0; c < nchunks; ++c) fn(c, c * chunk, std::min(total, (c + 1) * chunk));
    return;
  }
  std::atomic<i64> next{0};
  auto body = [&] {
    for (;;) {
      const i64 c = next.fetch_add(1);
      if (c >= nchunks) return;
      fn(c, c * chunk, std::min(total, (c + 1) * chunk));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
}

}  // namespace toral
