#pragma once

#include <functional>
#include <span>

namespace sace {

/// Run fn(sample, worker) for sample = 0..count-1 on a small thread pool.
/// Workers pull indices from a shared counter; each sample writes only its
/// own output slot, so results never depend on the schedule. worker is in
/// 0..threads-1 for per-worker scratch. threads <= 0 picks the hardware
/// concurrency.
void parallel_samples(long count, int threads,
                      const std::function<void(long sample, int worker)>& fn);

int resolve_threads(int threads);

/// Blocked pairwise summation; deterministic for a fixed-order input and
/// more accurate than a running sum on long Monte Carlo slot arrays.
double pairwise_sum(std::span<const double> values);

struct MeanSe {
  double mean;
  double se;  // sample standard deviation / sqrt(n)
};

MeanSe mean_and_se(std::span<const double> values);

}  // namespace sace
