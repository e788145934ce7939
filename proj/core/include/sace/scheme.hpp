#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sace/functionals.hpp"
#include "sace/noise.hpp"
#include "sace/operators.hpp"
#include "sace/rng.hpp"
#include "sace/spectral.hpp"

namespace sace {

enum class SchemeVariant { tamed_exp_euler, untamed_exp_euler, semi_implicit };

/// Any coefficient beyond this magnitude (or non-finite) counts as a
/// diverged trajectory; only the untamed control is expected to get there.
inline constexpr double kBlowupThreshold = 1e12;

struct SchemeConfig {
  int n_modes = 0;
  double tau = 0.0;
  long n_steps = 0;
  double beta = 0.5;
  SchemeVariant variant = SchemeVariant::tamed_exp_euler;
  double tau_cap = 1.0;  // admissible step sizes are (0, tau_cap]

  void validate() const;  // throws std::invalid_argument
};

struct TrajectoryRecord {
  std::vector<double> step_times;
  std::vector<double> functionals;
  std::vector<SpectralField> states;  // filled only when requested
  std::optional<long> blowup_step;
};

/// Precomputed per-mode arrays and scratch buffers for one scheme
/// configuration. The fused step is arranged to be bit-identical to the
/// explicit composition semigroup_apply + taming_factor * phi_operator(
/// nemytskii(.)) + noise, sharing the same kernels and evaluation order.
class Stepper {
 public:
  /// m_points = 0 picks the canonical oversampled grid m = 4 N.
  Stepper(const SchemeConfig& cfg, const std::optional<NoiseSpectrum>& spectrum,
          int m_points = 0);

  const SchemeConfig& config() const { return cfg_; }
  int grid_points() const { return m_points_; }

  /// One step of the configured variant. state and noise_inc have n_modes
  /// entries; state is updated in place. Returns false when the new state
  /// trips the blow-up detector (state left as computed).
  bool step(std::span<double> state, const std::optional<ModelParams>& params,
            std::span<const double> noise_inc);

  /// Scaled Gaussian increment for the given step index (zeros when the
  /// stepper was built without a spectrum).
  void draw_increment(const RngStream& rng, std::uint64_t step_index,
                      std::span<double> out) const;

  /// Per-mode e^{-lambda_k tau}, shared with refine_coupling accumulation.
  std::span<const double> semigroup_decay() const { return decay_; }
  std::span<const double> sigmas() const { return sigma_; }

  double sup_on_grid(std::span<const double> state);

 private:
  void tamed_or_untamed(std::span<double> state, const std::optional<ModelParams>& params,
                        std::span<const double> noise_inc, bool tamed);
  void semi_implicit(std::span<double> state, const std::optional<ModelParams>& params,
                     std::span<const double> noise_inc);

  SchemeConfig cfg_;
  int m_points_;
  const SineTable* table_;
  double tau_pow_beta_;
  std::vector<double> decay_;     // e^{-lambda_k tau}
  std::vector<double> phim_;      // (1 - e^{-lambda_k tau}) / lambda_k
  std::vector<double> sobw_;      // lambda_k^beta
  std::vector<double> sigma_;     // per-mode increment std dev (may be zero)
  std::vector<double> phys_;      // scratch, m
  std::vector<double> fcoef_;     // scratch, N
  std::vector<double> iter_;      // scratch, N (semi-implicit)
};

bool state_is_finite(std::span<const double> state);

/// Single-step operations composed from the module operators; the
/// trajectory runners produce bit-identical states.
SpectralField tamed_exp_euler_step(const SpectralField& v,
                                   const std::optional<ModelParams>& params,
                                   const SpectralField& noise_inc,
                                   const SchemeConfig& cfg, const CollocationGrid& grid);
/// Taming factor pinned to 1; throws BlowupError past the divergence gate.
SpectralField untamed_exp_euler_step(const SpectralField& v,
                                     const std::optional<ModelParams>& params,
                                     const SpectralField& noise_inc,
                                     const SchemeConfig& cfg, const CollocationGrid& grid);
/// Backward Euler in the linear part, drift resolved by fixed-point
/// iteration to 1e-10 residual (at most 50 sweeps, else ConvergenceError).
SpectralField semi_implicit_step(const SpectralField& v,
                                 const std::optional<ModelParams>& params,
                                 const SpectralField& noise_inc, const SchemeConfig& cfg);

/// Visits the state at t = 0 and after every save_stride-th step.
using SaveCallback = std::function<void(long step, double time, std::span<const double> coeffs)>;

std::optional<long> run_trajectory_visit(const SchemeConfig& cfg,
                                         const std::optional<ModelParams>& params,
                                         const std::optional<NoiseSpectrum>& spectrum,
                                         const SpectralField& u0, const RngStream& rng,
                                         long save_stride, const SaveCallback& visit);

TrajectoryRecord run_trajectory(const SchemeConfig& cfg,
                                const std::optional<ModelParams>& params,
                                const std::optional<NoiseSpectrum>& spectrum,
                                const SpectralField& u0, const FunctionalSpec& functional,
                                const RngStream& rng, long save_stride,
                                bool save_states = false);

/// Coarse/fine pair driven by one Brownian path: the fine grid draws the
/// increments, the coarse consumes their refine_coupling accumulation and,
/// when coarser in space, only the leading modes.
struct CoupledPair {
  SpectralField coarse_final;
  SpectralField fine_final;
  std::optional<long> blowup_step;
};

CoupledPair run_coupled_pair(const SchemeConfig& coarse_cfg, const SchemeConfig& fine_cfg,
                             const std::optional<ModelParams>& params,
                             const NoiseSpectrum& spectrum, const SpectralField& u0,
                             const RngStream& rng);

/// Several coarse resolutions against one reference path, all coupled.
struct CoupledLevels {
  std::vector<SpectralField> level_finals;
  SpectralField ref_final;
  std::optional<long> blowup_step;
};

CoupledLevels run_coupled_levels(const std::vector<SchemeConfig>& level_cfgs,
                                 const SchemeConfig& ref_cfg,
                                 const std::optional<ModelParams>& params,
                                 const NoiseSpectrum& spectrum, const SpectralField& u0,
                                 const RngStream& rng);

}  // namespace sace
