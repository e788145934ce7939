#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sace/noise.hpp"
#include "sace/parallel.hpp"

using namespace sace;

TEST_CASE("noise regularity admissibility") {
  // white noise at the declared boundary beta = 1/2
  const RegularityReport white_half = regularity_check(NoiseSpectrum(NoiseKind::white, 0, 0.5, 64));
  CHECK(white_half.admissible);
  CHECK(white_half.at_boundary);
  CHECK(white_half.tail_exponent == doctest::Approx(-1.0));

  const RegularityReport trace = regularity_check(NoiseSpectrum(NoiseKind::power_law, 1.0, 1.0, 64));
  CHECK(trace.admissible);
  CHECK_FALSE(trace.at_boundary);
  CHECK(trace.tail_exponent == doctest::Approx(-2.0));
  CHECK(trace.partial_sum > 0.0);

  CHECK_FALSE(regularity_check(NoiseSpectrum(NoiseKind::white, 0, 1.0, 64)).admissible);
  CHECK(regularity_check(NoiseSpectrum(NoiseKind::white, 0, 0.4, 64)).admissible);
  CHECK_FALSE(regularity_check(NoiseSpectrum(NoiseKind::white, 0, 0.4, 64)).at_boundary);

  CHECK_THROWS_AS(NoiseSpectrum(NoiseKind::power_law, -1.0, 1.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(NoiseSpectrum(NoiseKind::power_law, 1.0, 0.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(NoiseSpectrum(NoiseKind::power_law, 1.0, 1.2, 64), std::invalid_argument);
}

TEST_CASE("increment variance formula") {
  CHECK(increment_sigma(1.0, eigenvalue(1), 0.1) * increment_sigma(1.0, eigenvalue(1), 0.1) ==
        doctest::Approx(0.043623271605605438).epsilon(1e-14));
  // long-step limit is the stationary variance q / (2 lambda)
  CHECK(increment_sigma(1.0, eigenvalue(1), 1e6) * increment_sigma(1.0, eigenvalue(1), 1e6) ==
        doctest::Approx(0.050660591821168886).epsilon(1e-12));
  CHECK(increment_sigma(0.0, eigenvalue(3), 0.1) == 0.0);
}

TEST_CASE("increment sample variance matches the formula") {
  const NoiseSpectrum spec(NoiseKind::white, 0, 0.5, 4);
  const RngStream rng(31337, 0);
  const long n = 1000000;
  std::vector<double> sq(static_cast<size_t>(n));
  std::vector<double> inc(4);
  const std::vector<double> sigma = increment_sigmas(spec, 0.1);
  for (long i = 0; i < n; ++i) {
    rng.substream(static_cast<std::uint64_t>(i)).fill_gaussians(DrawTag::convolution_increment, 0, inc);
    const double v = sigma[0] * inc[0];
    sq[static_cast<size_t>(i)] = v * v;
  }
  const MeanSe ms = mean_and_se(sq);
  CHECK(std::abs(ms.mean - 0.043623271605605438) <= 3.0 * ms.se);
}

TEST_CASE("convolution increments are reproducible and mode-q scaled") {
  const NoiseSpectrum spec(NoiseKind::power_law, 1.0, 1.0, 8);
  const RngStream rng(7, 11);
  const SpectralField a = convolution_increment(spec, 0.05, rng, 3);
  const SpectralField b = convolution_increment(spec, 0.05, rng, 3);
  for (int k = 0; k < 8; ++k) CHECK(a.coeffs()[k] == b.coeffs()[k]);
  const SpectralField c = convolution_increment(spec, 0.05, rng, 4);
  CHECK(a.coeffs()[0] != c.coeffs()[0]);
}

TEST_CASE("stationary convolution sample variances") {
  const NoiseSpectrum spec(NoiseKind::power_law, 1.0, 1.0, 2);
  // q_k/(2 lambda_k): mode 1 = 1/(2 pi^2), mode 2 = (1/4)/(8 pi^2)
  const long n = 100000;
  std::vector<double> sq1(static_cast<size_t>(n)), sq2(static_cast<size_t>(n));
  const RngStream rng(5150, 0);
  for (long i = 0; i < n; ++i) {
    const SpectralField s =
        stationary_convolution_sample(spec, rng.substream(static_cast<std::uint64_t>(i)));
    sq1[static_cast<size_t>(i)] = s.mode(1) * s.mode(1);
    sq2[static_cast<size_t>(i)] = s.mode(2) * s.mode(2);
  }
  const MeanSe m1 = mean_and_se(sq1), m2 = mean_and_se(sq2);
  CHECK(std::abs(m1.mean - 0.050660591821168886) <= 4.0 * m1.se);
  CHECK(std::abs(m2.mean - 0.25 * 0.012665147955292221) <= 4.0 * m2.se);

  CHECK_THROWS_AS(stationary_convolution_sample(NoiseSpectrum(NoiseKind::white, 0, 1.0, 4),
                                                rng),
                  std::domain_error);
}

TEST_CASE("refine_coupling identities") {
  const NoiseSpectrum spec(NoiseKind::power_law, 1.0, 1.0, 6);
  const RngStream rng(808, 2);
  const double tau_f = 0.03125;

  // single fine step: identity
  const SpectralField one = convolution_increment(spec, tau_f, rng, 0);
  const SpectralField same = refine_coupling({one}, tau_f);
  for (int k = 0; k < 6; ++k) CHECK(same.coeffs()[k] == one.coeffs()[k]);

  // two-substep variance identity e^{-2 lambda tau} s^2 + s^2 = s_coarse^2
  for (int k = 1; k <= 6; ++k) {
    const double lam = eigenvalue(k);
    const double s2 = increment_sigma(spec.q(k), lam, tau_f) * increment_sigma(spec.q(k), lam, tau_f);
    const double combined = std::exp(-2.0 * lam * tau_f) * s2 + s2;
    const double coarse =
        increment_sigma(spec.q(k), lam, 2.0 * tau_f) * increment_sigma(spec.q(k), lam, 2.0 * tau_f);
    CHECK(combined == doctest::Approx(coarse).epsilon(1e-14));
  }

  // zero increments stay zero
  const SpectralField z = refine_coupling({SpectralField(6), SpectralField(6)}, tau_f);
  for (double c : z.coeffs()) CHECK(c == 0.0);

  CHECK_THROWS_AS(refine_coupling({}, tau_f), std::invalid_argument);
}

TEST_CASE("coupled accumulation reproduces the fine convolution pathwise") {
  // with no drift, the OU recursion driven by refined increments must equal
  // the fine recursion sampled at coarse times, mode by mode
  const NoiseSpectrum spec(NoiseKind::power_law, 1.0, 1.0, 5);
  const RngStream rng(4242, 9);
  const double tau_f = 0.0625;
  const int ratio = 4, coarse_steps = 6;

  std::vector<double> fine(5, 0.0), coarse(5, 0.0);
  for (int cstep = 0; cstep < coarse_steps; ++cstep) {
    std::vector<SpectralField> incs;
    for (int j = 0; j < ratio; ++j) {
      const auto idx = static_cast<std::uint64_t>(cstep * ratio + j);
      const SpectralField inc = convolution_increment(spec, tau_f, rng, idx);
      for (int k = 1; k <= 5; ++k)
        fine[k - 1] = std::exp(-eigenvalue(k) * tau_f) * fine[k - 1] + inc.coeffs()[k - 1];
      incs.push_back(inc);
    }
    const SpectralField coupled = refine_coupling(incs, tau_f);
    for (int k = 1; k <= 5; ++k)
      coarse[k - 1] =
          std::exp(-eigenvalue(k) * (ratio * tau_f)) * coarse[k - 1] + coupled.coeffs()[k - 1];
  }
  for (int k = 0; k < 5; ++k) CHECK(coarse[k] == doctest::Approx(fine[k]).epsilon(1e-12));
}

TEST_CASE("cross-mode independence of increments") {
  const NoiseSpectrum spec(NoiseKind::white, 0, 0.5, 6);
  const RngStream rng(99991, 0);
  const long n = 100000;
  std::vector<double> prod12(static_cast<size_t>(n)), prod35(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) {
    const SpectralField inc =
        convolution_increment(spec, 0.1, rng.substream(static_cast<std::uint64_t>(i)), 0);
    prod12[static_cast<size_t>(i)] = inc.mode(1) * inc.mode(2);
    prod35[static_cast<size_t>(i)] = inc.mode(3) * inc.mode(5);
  }
  const MeanSe m12 = mean_and_se(prod12), m35 = mean_and_se(prod35);
  CHECK(std::abs(m12.mean) <= 4.0 * m12.se);
  CHECK(std::abs(m35.mean) <= 4.0 * m35.se);
}
