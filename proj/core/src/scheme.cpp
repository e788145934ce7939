#include "sace/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sace/errors.hpp"

namespace sace {

void SchemeConfig::validate() const {
  if (n_modes < 1) throw std::invalid_argument("SchemeConfig: n_modes must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("SchemeConfig: tau must be > 0");
  if (!(tau_cap > 0.0)) throw std::invalid_argument("SchemeConfig: tau_cap must be > 0");
  if (tau > tau_cap)
    throw std::invalid_argument("SchemeConfig: tau exceeds tau_cap");
  if (n_steps < 0) throw std::invalid_argument("SchemeConfig: n_steps must be >= 0");
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("SchemeConfig: beta must lie in (0,1]");
}

bool state_is_finite(std::span<const double> state) {
  for (double c : state)
    if (!std::isfinite(c) || std::abs(c) > kBlowupThreshold) return false;
  return true;
}

Stepper::Stepper(const SchemeConfig& cfg, const std::optional<NoiseSpectrum>& spectrum,
                 int m_points)
    : cfg_(cfg), m_points_(m_points > 0 ? m_points : 4 * cfg.n_modes) {
  cfg_.validate();
  if (m_points_ < 4 * cfg.n_modes)
    throw std::invalid_argument("Stepper: grid must oversample, m >= 4 N");
  table_ = &sine_table(cfg.n_modes, m_points_);
  tau_pow_beta_ = std::pow(cfg.tau, cfg.beta);
  const size_t n = static_cast<size_t>(cfg.n_modes);
  decay_.resize(n);
  phim_.resize(n);
  sobw_.resize(n);
  sigma_.assign(n, 0.0);
  for (int k = 1; k <= cfg.n_modes; ++k) {
    const double lam = eigenvalue(k);
    decay_[k - 1] = std::exp(-lam * cfg.tau);
    phim_[k - 1] = phi_multiplier(lam, cfg.tau);
    sobw_[k - 1] = std::pow(lam, cfg.beta);
  }
  if (spectrum) {
    if (spectrum->n_modes < cfg.n_modes)
      throw std::invalid_argument("Stepper: spectrum covers fewer modes than the scheme");
    for (int k = 1; k <= cfg.n_modes; ++k)
      sigma_[k - 1] = increment_sigma(spectrum->q(k), eigenvalue(k), cfg.tau);
  }
  phys_.resize(static_cast<size_t>(m_points_));
  fcoef_.resize(n);
  iter_.resize(n);
}

void Stepper::draw_increment(const RngStream& rng, std::uint64_t step_index,
                             std::span<double> out) const {
  rng.fill_gaussians(DrawTag::convolution_increment, step_index, out);
  for (size_t k = 0; k < out.size(); ++k) out[k] *= sigma_[k];
}

double Stepper::sup_on_grid(std::span<const double> state) {
  to_physical(state, *table_, phys_);
  double s = 0.0;
  for (double v : phys_) s = std::max(s, std::abs(v));
  return s;
}

void Stepper::tamed_or_untamed(std::span<double> state,
                               const std::optional<ModelParams>& params,
                               std::span<const double> noise_inc, bool tamed) {
  const int n = cfg_.n_modes;
  if (params) {
    to_physical(state, *table_, phys_);
    double g = 1.0;
    if (tamed) {
      double sup = 0.0;
      for (double v : phys_) sup = std::max(sup, std::abs(v));
      const double h = sobolev_norm(state, sobw_);
      g = taming_from_norms(sup, h, tau_pow_beta_);
    }
    for (double& v : phys_) v = params->f(v);
    to_spectral(phys_, *table_, fcoef_);
    for (int k = 0; k < n; ++k) {
      double drift = fcoef_[k] * phim_[k];
      drift *= g;
      double s = decay_[k] * state[k];
      s += drift;
      s += noise_inc[k];
      state[k] = s;
    }
  } else {
    for (int k = 0; k < n; ++k) state[k] = decay_[k] * state[k] + noise_inc[k];
  }
}

void Stepper::semi_implicit(std::span<double> state,
                            const std::optional<ModelParams>& params,
                            std::span<const double> noise_inc) {
  const int n = cfg_.n_modes;
  const double tau = cfg_.tau;
  if (!params) {
    for (int k = 1; k <= n; ++k)
      state[k - 1] = (state[k - 1] + noise_inc[k - 1]) / (1.0 + tau * eigenvalue(k));
    return;
  }
  // Fixed point of W = (I + tau A)^{-1} (V + tau F_N(W) + noise).
  std::vector<double>& w = iter_;
  for (int k = 0; k < n; ++k) w[k] = state[k];
  const double tol = 1e-10;
  for (int sweep = 0; sweep < 50; ++sweep) {
    to_physical(w, *table_, phys_);
    for (double& v : phys_) v = params->f(v);
    to_spectral(phys_, *table_, fcoef_);
    for (int k = 1; k <= n; ++k)
      w[k - 1] = (state[k - 1] + tau * fcoef_[k - 1] + noise_inc[k - 1]) /
                 (1.0 + tau * eigenvalue(k));
    // residual with the drift re-evaluated at the new iterate
    to_physical(w, *table_, phys_);
    for (double& v : phys_) v = params->f(v);
    to_spectral(phys_, *table_, fcoef_);
    double resid2 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double r = (1.0 + tau * eigenvalue(k)) * w[k - 1] - state[k - 1] -
                       tau * fcoef_[k - 1] - noise_inc[k - 1];
      resid2 += r * r;
    }
    if (std::sqrt(resid2) <= tol) {
      for (int k = 0; k < n; ++k) state[k] = w[k];
      return;
    }
  }
  throw ConvergenceError("semi_implicit_step: fixed-point iteration did not reach 1e-10 in 50 sweeps");
}

bool Stepper::step(std::span<double> state, const std::optional<ModelParams>& params,
                   std::span<const double> noise_inc) {
  if (state.size() != static_cast<size_t>(cfg_.n_modes) ||
      noise_inc.size() != static_cast<size_t>(cfg_.n_modes))
    throw std::invalid_argument("Stepper::step: size mismatch");
  switch (cfg_.variant) {
    case SchemeVariant::tamed_exp_euler:
      tamed_or_untamed(state, params, noise_inc, true);
      break;
    case SchemeVariant::untamed_exp_euler:
      tamed_or_untamed(state, params, noise_inc, false);
      break;
    case SchemeVariant::semi_implicit:
      semi_implicit(state, params, noise_inc);
      break;
  }
  return state_is_finite(state);
}

namespace {

SpectralField run_single_step(const SpectralField& v,
                              const std::optional<ModelParams>& params,
                              const SpectralField& noise_inc, SchemeConfig cfg,
                              int m_points, bool throw_on_blowup) {
  if (v.n_modes() != noise_inc.n_modes())
    throw std::invalid_argument("step: field and noise increment sizes differ");
  cfg.n_modes = v.n_modes();
  if (cfg.n_steps < 1) cfg.n_steps = 1;
  Stepper stepper(cfg, std::nullopt, m_points);
  std::vector<double> state(v.coeffs().begin(), v.coeffs().end());
  const bool finite = stepper.step(state, params, noise_inc.coeffs());
  if (!finite) {
    if (throw_on_blowup) throw BlowupError("trajectory diverged", 1);
    // fall through; SpectralField construction rejects non-finite entries
  }
  return SpectralField(std::move(state));
}

}  // namespace

SpectralField tamed_exp_euler_step(const SpectralField& v,
                                   const std::optional<ModelParams>& params,
                                   const SpectralField& noise_inc,
                                   const SchemeConfig& cfg, const CollocationGrid& grid) {
  if (grid.m_points < 4 * v.n_modes())
    throw std::invalid_argument("tamed_exp_euler_step: grid must oversample, m >= 4 N");
  SchemeConfig c = cfg;
  c.variant = SchemeVariant::tamed_exp_euler;
  return run_single_step(v, params, noise_inc, c, grid.m_points, false);
}

SpectralField untamed_exp_euler_step(const SpectralField& v,
                                     const std::optional<ModelParams>& params,
                                     const SpectralField& noise_inc,
                                     const SchemeConfig& cfg, const CollocationGrid& grid) {
  if (grid.m_points < 4 * v.n_modes())
    throw std::invalid_argument("untamed_exp_euler_step: grid must oversample, m >= 4 N");
  SchemeConfig c = cfg;
  c.variant = SchemeVariant::untamed_exp_euler;
  return run_single_step(v, params, noise_inc, c, grid.m_points, true);
}

SpectralField semi_implicit_step(const SpectralField& v,
                                 const std::optional<ModelParams>& params,
                                 const SpectralField& noise_inc, const SchemeConfig& cfg) {
  SchemeConfig c = cfg;
  c.variant = SchemeVariant::semi_implicit;
  if (params && !(c.tau * params->lipschitz_onesided < 1.0))
    throw std::invalid_argument("semi_implicit_step: needs tau * L_F < 1 for contraction");
  return run_single_step(v, params, noise_inc, c, 0, false);
}

namespace {

void check_start_conditions(const SchemeConfig& cfg,
                            const std::optional<ModelParams>& params,
                            const std::optional<NoiseSpectrum>& spectrum) {
  cfg.validate();
  if (params && !(params->lipschitz_onesided < eigenvalue(1)))
    throw ConfigError(
        "dissipativity violated: one-sided Lipschitz constant L_F = " +
        std::to_string(params->lipschitz_onesided) + " must stay below lambda_1 = pi^2");
  if (spectrum && !regularity_check(*spectrum).admissible)
    throw ConfigError("noise spectrum fails the regularity summability check");
}

std::vector<double> project_initial(const SpectralField& u0, int n_modes) {
  std::vector<double> state(static_cast<size_t>(n_modes), 0.0);
  const int copy = std::min(n_modes, u0.n_modes());
  for (int k = 0; k < copy; ++k) state[static_cast<size_t>(k)] = u0.coeffs()[k];
  return state;
}

}  // namespace

std::optional<long> run_trajectory_visit(const SchemeConfig& cfg,
                                         const std::optional<ModelParams>& params,
                                         const std::optional<NoiseSpectrum>& spectrum,
                                         const SpectralField& u0, const RngStream& rng,
                                         long save_stride, const SaveCallback& visit) {
  check_start_conditions(cfg, params, spectrum);
  if (save_stride < 1) throw std::invalid_argument("save_stride must be >= 1");
  if (cfg.n_steps % save_stride != 0)
    throw std::invalid_argument("save_stride must divide n_steps");

  Stepper stepper(cfg, spectrum);
  std::vector<double> state = project_initial(u0, cfg.n_modes);
  std::vector<double> noise(static_cast<size_t>(cfg.n_modes), 0.0);

  visit(0, 0.0, state);
  for (long k = 0; k < cfg.n_steps; ++k) {
    if (spectrum) stepper.draw_increment(rng, static_cast<std::uint64_t>(k), noise);
    const bool finite = stepper.step(state, params, noise);
    if (!finite) return k + 1;
    if ((k + 1) % save_stride == 0)
      visit(k + 1, static_cast<double>(k + 1) * cfg.tau, state);
  }
  return std::nullopt;
}

TrajectoryRecord run_trajectory(const SchemeConfig& cfg,
                                const std::optional<ModelParams>& params,
                                const std::optional<NoiseSpectrum>& spectrum,
                                const SpectralField& u0, const FunctionalSpec& functional,
                                const RngStream& rng, long save_stride, bool save_states) {
  TrajectoryRecord rec;
  rec.blowup_step = run_trajectory_visit(
      cfg, params, spectrum, u0, rng, save_stride,
      [&](long, double t, std::span<const double> coeffs) {
        rec.step_times.push_back(t);
        rec.functionals.push_back(functional.evaluate(coeffs));
        if (save_states)
          rec.states.push_back(SpectralField(std::vector<double>(coeffs.begin(), coeffs.end())));
      });
  return rec;
}

namespace {

long coupling_ratio(double tau_coarse, double tau_fine) {
  const double raw = tau_coarse / tau_fine;
  const long ratio = std::lround(raw);
  if (ratio < 1 || std::abs(raw - static_cast<double>(ratio)) > 1e-9 * raw)
    throw std::invalid_argument("coupling: coarse tau must be an integer multiple of fine tau");
  return ratio;
}

}  // namespace

CoupledLevels run_coupled_levels(const std::vector<SchemeConfig>& level_cfgs,
                                 const SchemeConfig& ref_cfg,
                                 const std::optional<ModelParams>& params,
                                 const NoiseSpectrum& spectrum, const SpectralField& u0,
                                 const RngStream& rng) {
  check_start_conditions(ref_cfg, params, spectrum);
  Stepper ref_stepper(ref_cfg, spectrum);

  struct Level {
    Stepper stepper;
    std::vector<double> state;
    std::vector<double> acc;
    long ratio;
    long substep = 0;
  };
  std::vector<Level> levels;
  levels.reserve(level_cfgs.size());
  for (const auto& cfg : level_cfgs) {
    check_start_conditions(cfg, params, std::nullopt);
    if (cfg.n_modes > ref_cfg.n_modes)
      throw std::invalid_argument("coupling: level n_modes must not exceed the reference");
    const long ratio = coupling_ratio(cfg.tau, ref_cfg.tau);
    if (cfg.n_steps * ratio != ref_cfg.n_steps)
      throw std::invalid_argument("coupling: level and reference horizons differ");
    levels.push_back(Level{Stepper(cfg, spectrum), project_initial(u0, cfg.n_modes),
                           std::vector<double>(static_cast<size_t>(cfg.n_modes), 0.0),
                           ratio});
  }

  std::vector<double> ref_state = project_initial(u0, ref_cfg.n_modes);
  std::vector<double> inc(static_cast<size_t>(ref_cfg.n_modes));
  std::span<const double> fine_decay = ref_stepper.semigroup_decay();

  CoupledLevels out{{}, SpectralField(ref_cfg.n_modes), std::nullopt};
  for (long j = 0; j < ref_cfg.n_steps; ++j) {
    ref_stepper.draw_increment(rng, static_cast<std::uint64_t>(j), inc);
    if (!ref_stepper.step(ref_state, params, inc)) {
      out.blowup_step = j + 1;
      break;
    }
    bool stop = false;
    for (auto& lvl : levels) {
      const int n = lvl.stepper.config().n_modes;
      if (lvl.substep == 0) {
        for (int k = 0; k < n; ++k) lvl.acc[static_cast<size_t>(k)] = inc[static_cast<size_t>(k)];
      } else {
        for (int k = 0; k < n; ++k)
          lvl.acc[static_cast<size_t>(k)] =
              fine_decay[static_cast<size_t>(k)] * lvl.acc[static_cast<size_t>(k)] +
              inc[static_cast<size_t>(k)];
      }
      if (++lvl.substep == lvl.ratio) {
        lvl.substep = 0;
        if (!lvl.stepper.step(lvl.state, params, lvl.acc)) {
          out.blowup_step = j + 1;
          stop = true;
          break;
        }
      }
    }
    if (stop) break;
  }

  if (!out.blowup_step) {
    out.ref_final = SpectralField(std::move(ref_state));
    for (auto& lvl : levels) out.level_finals.push_back(SpectralField(std::move(lvl.state)));
  }
  return out;
}

CoupledPair run_coupled_pair(const SchemeConfig& coarse_cfg, const SchemeConfig& fine_cfg,
                             const std::optional<ModelParams>& params,
                             const NoiseSpectrum& spectrum, const SpectralField& u0,
                             const RngStream& rng) {
  CoupledLevels levels =
      run_coupled_levels({coarse_cfg}, fine_cfg, params, spectrum, u0, rng);
  if (levels.blowup_step)
    return CoupledPair{SpectralField(coarse_cfg.n_modes), SpectralField(fine_cfg.n_modes),
                       levels.blowup_step};
  return CoupledPair{std::move(levels.level_finals.front()), std::move(levels.ref_final),
                     std::nullopt};
}

}  // namespace sace
