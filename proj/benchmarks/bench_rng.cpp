#include <benchmark/benchmark.h>

#include "sace/noise.hpp"
#include "sace/rng.hpp"

namespace {

void BM_philox_block(benchmark::State& state) {
  std::array<std::uint64_t, 4> ctr{0, 0, 0, 0};
  const std::array<std::uint64_t, 2> key{42, 7};
  for (auto _ : state) {
    ++ctr[0];
    benchmark::DoNotOptimize(sace::philox4x64(ctr, key));
  }
  state.SetItemsProcessed(state.iterations() * 4);
}
BENCHMARK(BM_philox_block);

void BM_gaussian_fill(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> out(static_cast<size_t>(n));
  const sace::RngStream rng(5, 1);
  std::uint64_t step = 0;
  for (auto _ : state) {
    rng.fill_gaussians(sace::DrawTag::convolution_increment, step++, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_gaussian_fill)->Arg(64)->Arg(256);

void BM_convolution_increment(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const sace::NoiseSpectrum spec(sace::NoiseKind::power_law, 1.0, 1.0, n);
  const sace::RngStream rng(6, 2);
  std::uint64_t step = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sace::convolution_increment(spec, 0.01, rng, step++));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_convolution_increment)->Arg(64)->Arg(256);

}  // namespace
