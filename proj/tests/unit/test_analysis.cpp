#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sace/analysis.hpp"
#include "sace/errors.hpp"
#include "sace/parallel.hpp"

using namespace sace;

namespace {

SchemeConfig make_cfg(int n, double tau, long steps,
                      SchemeVariant variant = SchemeVariant::tamed_exp_euler,
                      double beta = 1.0) {
  SchemeConfig cfg;
  cfg.n_modes = n;
  cfg.tau = tau;
  cfg.n_steps = steps;
  cfg.beta = beta;
  cfg.variant = variant;
  return cfg;
}

// E exp(-||v||^2) for independent centered Gaussian modes with the given
// variances: product of (1 + 2 var_k)^(-1/2)
double gaussian_exp_oracle(const NoiseSpectrum& spec, int n, double t) {
  double prod = 1.0;
  for (int k = 1; k <= n; ++k) {
    const double var = spec.q(k) * (-std::expm1(-2.0 * eigenvalue(k) * t)) / (2.0 * eigenvalue(k));
    prod /= std::sqrt(1.0 + 2.0 * var);
  }
  return prod;
}

}  // namespace

TEST_CASE("pairwise sum and mean/se") {
  std::vector<double> v(1000);
  for (size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i % 7) - 3.0;
  double plain = 0.0;
  for (double x : v) plain += x;
  CHECK(pairwise_sum(v) == doctest::Approx(plain).epsilon(1e-15));
  CHECK_THROWS_AS(mean_and_se(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("rate regression") {
  // exact slope -1
  std::vector<double> x = {0.0, 1.0, 2.0, 3.0};
  std::vector<double> y = {5.0, 4.0, 3.0, 2.0};
  std::vector<double> w = {1.0, 1.0, 1.0, 1.0};
  const RateFit f1 = rate_regression(x, y, w);
  REQUIRE(f1.determinate);
  CHECK(f1.slope == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(f1.halfwidth == doctest::Approx(0.0));

  // points (1,2),(2,4),(3,6) in log space: slope 2
  std::vector<double> x2 = {1.0, 2.0, 3.0};
  std::vector<double> y2 = {2.0, 4.0, 6.0};
  std::vector<double> w2 = {1.0, 1.0, 1.0};
  CHECK(rate_regression(x2, y2, w2).slope == doctest::Approx(2.0).epsilon(1e-14));

  // fewer than three points: indeterminate
  CHECK_FALSE(rate_regression(std::vector<double>{1.0, 2.0},
                              std::vector<double>{1.0, 2.0},
                              std::vector<double>{1.0, 1.0})
                  .determinate);

  // synthetic slope-1 data with 5% multiplicative noise stays near 1
  const RngStream rng(606, 0);
  for (int resample = 0; resample < 100; ++resample) {
    std::vector<double> lx, ly, lw;
    std::vector<double> g(5);
    rng.fill_gaussians(DrawTag::generic, static_cast<std::uint64_t>(resample), g);
    for (int i = 0; i < 5; ++i) {
      const double tau = std::pow(2.0, -(i + 3));
      lx.push_back(std::log(tau));
      ly.push_back(std::log(tau * (1.0 + 0.05 * g[static_cast<size_t>(i)])));
      lw.push_back(1.0);
    }
    const RateFit fit = rate_regression(lx, ly, lw);
    CHECK(fit.slope >= 0.9);
    CHECK(fit.slope <= 1.1);
  }
}

TEST_CASE("mc_weak_value basics") {
  const int n = 8;
  const NoiseSpectrum spec(NoiseKind::power_law, 1.0, 1.0, n);
  const SchemeConfig cfg = make_cfg(n, 0.25, 12);

  CHECK_THROWS_AS(mc_weak_value(cfg, std::nullopt, spec, SpectralField(n),
                                FunctionalSpec::mode(1), 1, 7, 1),
                  std::invalid_argument);

  // centered Gaussian: first-mode mean is zero within 4 SE
  const McEstimate m1 = mc_weak_value(cfg, std::nullopt, spec, SpectralField(n),
                                      FunctionalSpec::mode(1), 4000, 7, 1);
  CHECK(std::abs(m1.mean) <= 4.0 * m1.standard_error);
  CHECK(m1.blowups == 0);

  // exp functional against the closed-form Gaussian oracle
  const McEstimate m2 = mc_weak_value(cfg, std::nullopt, spec, SpectralField(n),
                                      FunctionalSpec::exp_neg_sq(), 4000, 7, 1);
  const double oracle = gaussian_exp_oracle(spec, n, 0.25 * 12);
  CHECK(std::abs(m2.mean - oracle) <= 4.0 * m2.standard_error);

  // deterministic given the seed, regardless of worker count
  const McEstimate again = mc_weak_value(cfg, std::nullopt, spec, SpectralField(n),
                                         FunctionalSpec::exp_neg_sq(), 4000, 7, 3);
  CHECK(again.mean == m2.mean);
  CHECK(again.standard_error == m2.standard_error);
}

TEST_CASE("weak_error_sweep on the drift-free model is exact") {
  const int n = 8;
  const NoiseSpectrum spec(NoiseKind::power_law, 1.0, 1.0, n);
  const SchemeConfig base = make_cfg(n, 0.0, 0);
  const std::vector<double> taus = {0.25, 0.125, 0.0625};
  const WeakErrorReport rep = weak_error_sweep(taus, 0.03125, 1.0, base, std::nullopt, spec,
                                               SpectralField(n), FunctionalSpec::exp_neg_sq(),
                                               64, 11, 1);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) {
    CHECK(row.error_vs_ref <= 1e-12);
    CHECK_FALSE(row.above_noise_floor);
  }
  CHECK_FALSE(rep.rate.determinate);
}

TEST_CASE("weak_error_sweep rejects non-nested step sizes") {
  const int n = 4;
  const NoiseSpectrum spec(NoiseKind::power_law, 1.0, 1.0, n);
  const SchemeConfig base = make_cfg(n, 0.0, 0);
  CHECK_THROWS_AS(weak_error_sweep(std::vector<double>{0.1}, 0.03, 1.0, base, std::nullopt,
                                   spec, SpectralField(n), FunctionalSpec::exp_neg_sq(), 8, 1, 1),
                  ConfigError);
}

TEST_CASE("spatial_error_sweep preconditions and single-point behavior") {
  const int n_ref = 32;
  const NoiseSpectrum spec(NoiseKind::power_law, 1.0, 1.0, n_ref);
  const SchemeConfig base = make_cfg(4, 0.125, 8);
  CHECK_THROWS_AS(spatial_error_sweep(std::vector<int>{16}, 0.125, 32, 1.0, base,
                                      std::nullopt, spec, SpectralField(4),
                                      FunctionalSpec::exp_neg_sq(), 8, 1, 1),
                  ConfigError);  // n_ref < 4 max(N)

  const WeakErrorReport rep = spatial_error_sweep(std::vector<int>{4}, 0.125, n_ref, 1.0, base,
                                                  std::nullopt, spec, SpectralField(4),
                                                  FunctionalSpec::exp_neg_sq(), 64, 3, 1);
  REQUIRE(rep.rows.size() == 1);
  CHECK_FALSE(rep.rate.determinate);  // one point never fits a rate
  CHECK(rep.rows[0].error_vs_ref > 0.0);
}

TEST_CASE("moment_curve on the drift-free model climbs to the stationary plateau") {
  const int n = 8;
  const NoiseSpectrum spec(NoiseKind::power_law, 1.0, 1.0, n);
  const SchemeConfig cfg = make_cfg(n, 0.1, 30);
  const MomentCurve curve = moment_curve(cfg, std::nullopt, spec, SpectralField(n), 2, 1000,
                                         21, 1, 5, 1.5);
  REQUIRE(curve.times.size() == 7);
  CHECK(curve.estimate.front() == 0.0);  // ||u0||^2 = 0 at t = 0
  CHECK(curve.blowups == 0);
  // monotone approach to stationarity within noise
  for (size_t i = 1; i < curve.estimate.size(); ++i)
    CHECK(curve.estimate[i] >= curve.estimate[i - 1] - 4.0 * curve.standard_error[i]);
  // plateau: last two estimates agree within noise
  const size_t last = curve.estimate.size() - 1;
  CHECK(std::abs(curve.estimate[last] - curve.estimate[last - 1]) <=
        4.0 * (curve.standard_error[last] + curve.standard_error[last - 1]));

  CHECK_THROWS_AS(moment_curve(cfg, std::nullopt, spec, SpectralField(n), 3, 1000, 21, 1, 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(moment_curve(cfg, std::nullopt, spec, SpectralField(n), 2, 100, 21, 1, 5),
                  std::invalid_argument);
}

TEST_CASE("ergodic_decay recovers lambda_1 exactly on the drift-free model") {
  const int n = 8;
  const NoiseSpectrum spec(NoiseKind::power_law, 1.0, 1.0, n);
  const SchemeConfig cfg = make_cfg(n, 0.02, 50);
  const ErgodicFit fit = ergodic_decay(std::nullopt, spec, cfg, SpectralField::unit_mode(n, 1),
                                       SpectralField(n), FunctionalSpec::mode(1), 4, 5, 1, 1);
  REQUIRE(fit.determinate);
  // coupled noise cancels pathwise, so the gap is e^{-lambda_1 t} exactly
  CHECK(fit.rho == doctest::Approx(eigenvalue(1)).epsilon(0.02));
  CHECK(fit.floor == doctest::Approx(eigenvalue(1)));

  // identical initial data: no gap anywhere, fit indeterminate
  const ErgodicFit zero = ergodic_decay(std::nullopt, spec, cfg, SpectralField(n),
                                        SpectralField(n), FunctionalSpec::mode(1), 4, 5, 1, 1);
  CHECK_FALSE(zero.determinate);
  for (double g : zero.gap) CHECK(g == 0.0);
}

TEST_CASE("invariant_measure_estimate matches the stationary Gaussian oracle") {
  const int n = 8;
  const NoiseSpectrum spec(NoiseKind::power_law, 1.0, 1.0, n);
  const SchemeConfig cfg = make_cfg(n, 0.05, 160);  // T = 8
  const InvariantEstimate est = invariant_measure_estimate(
      cfg, std::nullopt, spec, SpectralField(n), FunctionalSpec::exp_neg_sq(), 1.0, 300, 13, 1, 1);

  double oracle = 1.0;
  for (int k = 1; k <= n; ++k)
    oracle /= std::sqrt(1.0 + spec.q(k) / eigenvalue(k));  // 1 + 2 q/(2 lambda)
  CHECK(std::abs(est.time_average - oracle) <= 4.0 * est.time_average_se);
  CHECK(std::abs(est.ensemble_average - oracle) <= 4.0 * est.ensemble_se);
  CHECK_FALSE(est.burnin_warning);

  // odd functional under the symmetric dynamics averages to zero
  const InvariantEstimate odd = invariant_measure_estimate(
      cfg, ModelParams(0.0, 1.0, 0.0, 1.0), spec, SpectralField(n), FunctionalSpec::mode(1),
      1.0, 300, 13, 1, 1);
  CHECK(std::abs(odd.time_average) <= 4.0 * odd.time_average_se);
  CHECK(std::abs(odd.ensemble_average) <= 4.0 * odd.ensemble_se);

  // two seeds agree within the combined uncertainty
  const InvariantEstimate other = invariant_measure_estimate(
      cfg, std::nullopt, spec, SpectralField(n), FunctionalSpec::exp_neg_sq(), 1.0, 300, 14, 1, 1);
  const double comb = std::sqrt(est.time_average_se * est.time_average_se +
                                other.time_average_se * other.time_average_se);
  CHECK(std::abs(est.time_average - other.time_average) <= 4.0 * comb);

  // horizon must cover twice the burn-in
  CHECK_THROWS_AS(invariant_measure_estimate(make_cfg(n, 0.05, 20), std::nullopt, spec,
                                             SpectralField(n), FunctionalSpec::exp_neg_sq(),
                                             1.0, 300, 13, 1, 1),
                  ConfigError);
  // short burn-in only warns
  const InvariantEstimate warn = invariant_measure_estimate(
      cfg, std::nullopt, spec, SpectralField(n), FunctionalSpec::exp_neg_sq(), 0.1, 300, 13, 1, 1);
  CHECK(warn.burnin_warning);
}

TEST_CASE("odd functional under symmetric drift gives unbiased zero errors") {
  // f(x) = x - x^3 is odd and u0 = 0, so E<V, phi_1> vanishes; any
  // systematic nonzero sweep error would expose estimator bias
  const int n = 16;
  const NoiseSpectrum spec(NoiseKind::power_law, 1.0, 1.0, n);
  SchemeConfig base = make_cfg(n, 0.0, 0);
  const std::vector<double> taus = {0.125, 0.0625};
  const WeakErrorReport rep = weak_error_sweep(taus, 0.015625, 0.5, base,
                                               ModelParams(0.0, 1.0, 0.0, 1.0), spec,
                                               SpectralField(n), FunctionalSpec::mode(1),
                                               256, 23, 1);
  for (const auto& row : rep.rows) {
    CHECK(std::abs(row.mean) <= 4.0 * row.standard_error);
    CHECK(row.error_vs_ref <= 4.0 * row.error_stderr);
  }
}

TEST_CASE("common random numbers leave no excess variance on the drift-free model") {
  // the coupled temporal error estimator is exactly deterministic (zero)
  // without drift, which is the strongest form of variance reduction
  const int n = 6;
  const NoiseSpectrum spec(NoiseKind::power_law, 1.0, 1.0, n);
  const SchemeConfig base = make_cfg(n, 0.0, 0);
  const WeakErrorReport rep = weak_error_sweep(std::vector<double>{0.25}, 0.0625, 0.5, base,
                                               std::nullopt, spec, SpectralField(n),
                                               FunctionalSpec::exp_neg_sq(), 32, 19, 1);
  CHECK(rep.rows[0].error_stderr <= 1e-14);
}
