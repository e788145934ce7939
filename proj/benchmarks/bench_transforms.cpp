#include <benchmark/benchmark.h>

#include "sace/rng.hpp"
#include "sace/spectral.hpp"

namespace {

void BM_to_physical(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = 4 * n;
  std::vector<double> coeffs(static_cast<size_t>(n));
  sace::RngStream(1, 0).fill_gaussians(sace::DrawTag::generic, 0, coeffs);
  const sace::SineTable& table = sace::sine_table(n, m);
  std::vector<double> values(static_cast<size_t>(m));
  for (auto _ : state) {
    sace::to_physical(coeffs, table, values);
    benchmark::DoNotOptimize(values.data());
  }
  state.SetItemsProcessed(state.iterations() * n * m);
}
BENCHMARK(BM_to_physical)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

void BM_to_spectral(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = 4 * n;
  std::vector<double> values(static_cast<size_t>(m));
  sace::RngStream(2, 0).fill_gaussians(sace::DrawTag::generic, 0, values);
  const sace::SineTable& table = sace::sine_table(n, m);
  std::vector<double> coeffs(static_cast<size_t>(n));
  for (auto _ : state) {
    sace::to_spectral(values, table, coeffs);
    benchmark::DoNotOptimize(coeffs.data());
  }
  state.SetItemsProcessed(state.iterations() * n * m);
}
BENCHMARK(BM_to_spectral)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

void BM_round_trip(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = 4 * n;
  std::vector<double> coeffs(static_cast<size_t>(n));
  sace::RngStream(3, 0).fill_gaussians(sace::DrawTag::generic, 0, coeffs);
  const sace::SineTable& table = sace::sine_table(n, m);
  std::vector<double> values(static_cast<size_t>(m));
  for (auto _ : state) {
    sace::to_physical(coeffs, table, values);
    sace::to_spectral(values, table, coeffs);
    benchmark::DoNotOptimize(coeffs.data());
  }
}
BENCHMARK(BM_round_trip)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
