#include "sl2dyn/parallel.hpp"

#include <atomic>
#include <algorithm>
#include <thread>
#include <vector>

namespace sl2dyn {

namespace {
std::atomic<unsigned> g_workers{1};
}

void set_worker_count(unsigned n) { g_workers.store(n == 0 ? 1 : n); }
unsigned worker_count() { return g_workers.load(); }

void parallel_for_chunks(uint64_t n, const std::function<void(uint64_t, uint64_t)>& fn) {
  if (n == 0) return;
  const uint64_t chunk = kReductionBlock;
  const uint64_t num_chunks = (n + chunk - 1) / chunk;
  const unsigned workers = std::min<uint64_t>(worker_count(), num_chunks);
  if (workers <= 1) {
    for (uint64_t c = 0; c < num_chunks; ++c) {
      fn(c * chunk, std::min(n, (c + 1) * chunk));
    }
    return;
  }
  std::atomic<uint64_t> next{0};
  auto run = [&] {
    for (;;) {
      const uint64_t c = next.fetch_add(1);
      if (c >= num_chunks) return;
      fn(c * chunk, std::min(n, (c + 1) * chunk));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
}

double block_dot(const double* a, const double* b, uint64_t n) {
  const uint64_t num_chunks = (n + kReductionBlock - 1) / kReductionBlock;
  if (num_chunks == 0) return 0.0;
  std::vector<double> partial(num_chunks, 0.0);
  parallel_for_chunks(n, [&](uint64_t begin, uint64_t end) {
    double s = 0.0;
    for (uint64_t i = begin; i < end; ++i) s += a[i] * b[i];
    partial[begin / kReductionBlock] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double block_sum(const double* a, uint64_t n) {
  const uint64_t num_chunks = (n + kReductionBlock - 1) / kReductionBlock;
  if (num_chunks == 0) return 0.0;
  std::vector<double> partial(num_chunks, 0.0);
  parallel_for_chunks(n, [&](uint64_t begin, uint64_t end) {
    double s = 0.0;
    for (uint64_t i = begin; i < end; ++i) s += a[i];
    partial[begin / kReductionBlock] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace sl2dyn
