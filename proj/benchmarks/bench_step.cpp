#include <benchmark/benchmark.h>

#include "sace/scheme.hpp"

namespace {

sace::SchemeConfig cfg_for(int n, sace::SchemeVariant variant) {
  sace::SchemeConfig cfg;
  cfg.n_modes = n;
  cfg.tau = 1.0 / 256.0;
  cfg.n_steps = 1;
  cfg.beta = 1.0;
  cfg.variant = variant;
  return cfg;
}

void bench_step(benchmark::State& state, sace::SchemeVariant variant) {
  const int n = static_cast<int>(state.range(0));
  const sace::NoiseSpectrum spec(sace::NoiseKind::power_law, 1.0, 1.0, n);
  const sace::ModelParams params(0.0, 1.0, 0.0, 1.0);
  sace::Stepper stepper(cfg_for(n, variant), spec);
  std::vector<double> v(static_cast<size_t>(n)), inc(static_cast<size_t>(n));
  const sace::RngStream rng(11, 0);
  rng.fill_gaussians(sace::DrawTag::generic, 0, v);
  for (double& x : v) x *= 0.1;
  std::uint64_t step = 0;
  for (auto _ : state) {
    stepper.draw_increment(rng, step++, inc);
    stepper.step(v, params, inc);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_tamed_step(benchmark::State& state) {
  bench_step(state, sace::SchemeVariant::tamed_exp_euler);
}
BENCHMARK(BM_tamed_step)->Arg(16)->Arg(64)->Arg(256);

void BM_untamed_step(benchmark::State& state) {
  bench_step(state, sace::SchemeVariant::untamed_exp_euler);
}
BENCHMARK(BM_untamed_step)->Arg(64);

void BM_semi_implicit_step(benchmark::State& state) {
  bench_step(state, sace::SchemeVariant::semi_implicit);
}
BENCHMARK(BM_semi_implicit_step)->Arg(64);

void BM_drift_free_step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const sace::NoiseSpectrum spec(sace::NoiseKind::power_law, 1.0, 1.0, n);
  sace::Stepper stepper(cfg_for(n, sace::SchemeVariant::tamed_exp_euler), spec);
  std::vector<double> v(static_cast<size_t>(n), 0.0), inc(static_cast<size_t>(n));
  const sace::RngStream rng(12, 0);
  std::uint64_t step = 0;
  for (auto _ : state) {
    stepper.draw_increment(rng, step++, inc);
    stepper.step(v, std::nullopt, inc);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_drift_free_step)->Arg(64);

}  // namespace
