#pragma once

#include <cstdint>
#include <vector>

#include "sace/rng.hpp"
#include "sace/spectral.hpp"

namespace sace {

enum class NoiseKind { white, power_law };

/// Diagonal Q-Wiener covariance in the sine eigenbasis: q_k = k^{-2r}.
/// White noise is r = 0 (Q = I). beta is the declared regularity exponent
/// used both for the admissibility check and inside the taming factor.
struct NoiseSpectrum {
  NoiseSpectrum(NoiseKind kind, double decay, double beta, int n_modes);

  NoiseKind kind;
  double decay;  // r
  double beta;
  int n_modes;

  double q(int k) const;  // 1-based mode index
};

/// Summability check for sum_k lambda_k^(beta-1) q_k. The tail exponent is
/// 2(beta-1) - 2r; strict inequality against -1 is required, equality is
/// the boundary case (white noise at beta = 1/2) accepted with a warning.
struct RegularityReport {
  bool admissible;
  bool at_boundary;
  double tail_exponent;
  double partial_sum;  // over the represented modes, for diagnostics
};

RegularityReport regularity_check(const NoiseSpectrum& spectrum);

/// Per-mode standard deviations of the exact stochastic-convolution
/// increment over one step: sigma_k^2 = q_k (1 - e^{-2 lambda_k tau}) / (2 lambda_k).
std::vector<double> increment_sigmas(const NoiseSpectrum& spectrum, double tau);
double increment_sigma(double q, double lambda, double tau);

/// One exact increment of int_{t_k}^{t_{k+1}} e^{-(t_{k+1}-s)A} P_N dW(s),
/// addressed by the step index so draws are reproducible and coupling-safe.
SpectralField convolution_increment(const NoiseSpectrum& spectrum, double tau,
                                    const RngStream& rng, std::uint64_t step_index);

/// Collapse consecutive fine increments into the increment of one coarse
/// step covering them: out = sum_j e^{-lambda (n-1-j) tau_f} inc_j, computed
/// by the forward recursion acc <- e^{-lambda tau_f} acc + inc_j.
SpectralField refine_coupling(const std::vector<SpectralField>& fine_increments,
                              double tau_fine);

/// Exact draw from the stationary law of the stochastic convolution,
/// mode variance q_k / (2 lambda_k). Spectrum must be admissible.
SpectralField stationary_convolution_sample(const NoiseSpectrum& spectrum,
                                            const RngStream& rng,
                                            std::uint64_t index = 0);

}  // namespace sace
