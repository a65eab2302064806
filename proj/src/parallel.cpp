#include "lsfem/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace lsfem {

namespace {
std::atomic<int> thread_override{0};
}

int thread_count() {
  static const int cached = [] {
    if (const char* env = std::getenv("THREADS")) {
      int n = std::atoi(env);
      if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    return static_cast<int>(hw > 8 ? 8 : hw);
  }();
  int forced = thread_override.load();
  return forced >= 1 ? forced : cached;
}

void set_thread_override(int n) { thread_override.store(n); }

int chunk_count(int n, int chunk_size) {
  if (n <= 0) return 0;
  return (n + chunk_size - 1) / chunk_size;
}

void parallel_chunks(int n, int chunk_size, const std::function<void(int, int, int)>& fn) {
  const int chunks = chunk_count(n, chunk_size);
  if (chunks == 0) return;
  const int workers = std::min(thread_count(), chunks);
  if (workers <= 1) {
    for (int c = 0; c < chunks; ++c) {
      fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
    }
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int c = next.fetch_add(1);
        if (c >= chunks) break;
        fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace lsfem
