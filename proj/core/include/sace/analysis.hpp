#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sace/scheme.hpp"

namespace sace {

struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  long samples = 0;
  long blowups = 0;  // diverged trajectories excluded from the mean
};

/// Sample mean of Phi(V_K) over independent trajectories, one RNG stream
/// per sample. Deterministic given (config, master_seed).
McEstimate mc_weak_value(const SchemeConfig& cfg, const std::optional<ModelParams>& params,
                         const std::optional<NoiseSpectrum>& spectrum,
                         const SpectralField& u0, const FunctionalSpec& functional,
                         long samples, std::uint64_t master_seed, int threads);

struct RateFit {
  double slope = 0.0;
  double halfwidth = 0.0;
  bool determinate = false;
  int points_used = 0;
};

/// Weighted least squares on (log x, log err); halfwidth is 2x the slope
/// standard error from the weighted residual variance. Fewer than three
/// points leaves the fit indeterminate.
RateFit rate_regression(std::span<const double> log_x, std::span<const double> log_err,
                        std::span<const double> weights);

struct WeakErrorRow {
  double tau = 0.0;
  int n_modes = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  double error_vs_ref = 0.0;
  double error_stderr = 0.0;
  bool above_noise_floor = false;  // error > 3x its standard error
};

struct WeakErrorReport {
  std::vector<WeakErrorRow> rows;
  WeakErrorRow reference;
  RateFit rate;
  long samples = 0;
  long blowups = 0;
  std::uint64_t master_seed = 0;
};

/// Temporal sweep: fixed N, tau from tau_list, all levels coupled to one
/// reference path at tau_ref by common random numbers. The fit regresses
/// log error on log tau over rows above the noise floor.
WeakErrorReport weak_error_sweep(std::span<const double> tau_list, double tau_ref,
                                 double horizon, const SchemeConfig& base,
                                 const std::optional<ModelParams>& params,
                                 const NoiseSpectrum& spectrum, const SpectralField& u0,
                                 const FunctionalSpec& functional, long samples,
                                 std::uint64_t master_seed, int threads);

/// Spatial sweep: fixed tau, N from n_list against a reference at n_ref
/// (needs n_ref >= 4 max N). The fit regresses log error on log N.
WeakErrorReport spatial_error_sweep(std::span<const int> n_list, double tau, int n_ref,
                                    double horizon, const SchemeConfig& base,
                                    const std::optional<ModelParams>& params,
                                    const NoiseSpectrum& spectrum, const SpectralField& u0,
                                    const FunctionalSpec& functional, long samples,
                                    std::uint64_t master_seed, int threads);

struct MomentCurve {
  int p = 2;
  std::vector<double> times;
  std::vector<double> estimate;        // E ||V_k||_inf^p
  std::vector<double> standard_error;
  double flatness = 0.0;               // late-window mean / early-window mean
  double early_time = 5.0;
  long blowups = 0;
};

/// Curve of E ||V_k||_inf^p at the save times, p in {2,4,8}, M >= 1000.
MomentCurve moment_curve(const SchemeConfig& cfg, const std::optional<ModelParams>& params,
                         const std::optional<NoiseSpectrum>& spectrum,
                         const SpectralField& u0, int p, long samples,
                         std::uint64_t master_seed, int threads, long save_stride,
                         double early_time = 5.0);

struct ErgodicFit {
  std::vector<double> times;
  std::vector<double> gap;     // |E Phi(V_k; u0_a) - E Phi(V_k; u0_b)|
  std::vector<double> gap_se;
  double rho = 0.0;            // fitted decay exponent
  double halfwidth = 0.0;
  double floor = 0.0;          // lambda_1 - L_F
  bool determinate = false;
};

/// Exponential mixing diagnostic: two initial conditions driven by the same
/// Brownian path per sample; fits rho in gap ~ C e^{-rho t} over the window
/// where the gap exceeds three standard errors.
ErgodicFit ergodic_decay(const std::optional<ModelParams>& params,
                         const NoiseSpectrum& spectrum, const SchemeConfig& cfg,
                         const SpectralField& u0_a, const SpectralField& u0_b,
                         const FunctionalSpec& functional, long samples,
                         std::uint64_t master_seed, int threads, long save_stride);

struct InvariantEstimate {
  double time_average = 0.0;
  double time_average_se = 0.0;
  double ensemble_average = 0.0;
  double ensemble_se = 0.0;
  double gap = 0.0;     // |time_average - ensemble_average|, paired per sample
  double gap_se = 0.0;
  double burn_in = 0.0;
  bool burnin_warning = false;  // burn-in shorter than 5 mixing times
  long blowups = 0;
};

/// Ergodic-average versus ensemble-average consistency after burn-in.
InvariantEstimate invariant_measure_estimate(const SchemeConfig& cfg,
                                             const std::optional<ModelParams>& params,
                                             const std::optional<NoiseSpectrum>& spectrum,
                                             const SpectralField& u0,
                                             const FunctionalSpec& functional,
                                             double burn_in, long samples,
                                             std::uint64_t master_seed, int threads,
                                             long save_stride);

/// lambda_1 - L_F, the dissipativity margin that sets the mixing rate.
double mixing_rate_floor(const std::optional<ModelParams>& params);

}  // namespace sace
