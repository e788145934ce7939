#include "sace/parallel.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace sace {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_samples(long count, int threads,
                      const std::function<void(long sample, int worker)>& fn) {
  const int nw = resolve_threads(threads);
  if (nw == 1 || count <= 1) {
    for (long i = 0; i < count; ++i) fn(i, 0);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(nw));
  for (int w = 0; w < nw; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (;;) {
          const long i = next.fetch_add(1, std::memory_order_relaxed);
          if (i >= count || failed.load(std::memory_order_relaxed)) break;
          fn(i, w);
        }
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

double pairwise_block(const double* v, size_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const size_t half = n / 2;
  return pairwise_block(v, half) + pairwise_block(v + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return pairwise_block(values.data(), values.size());
}

MeanSe mean_and_se(std::span<const double> values) {
  const size_t n = values.size();
  if (n < 2) throw std::invalid_argument("mean_and_se: needs at least two values");
  const double mean = pairwise_sum(values) / static_cast<double>(n);
  std::vector<double> sq(n);
  for (size_t i = 0; i < n; ++i) {
    const double d = values[i] - mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
  return MeanSe{mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace sace
