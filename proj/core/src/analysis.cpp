#include "sace/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sace/errors.hpp"
#include "sace/parallel.hpp"

namespace sace {

double mixing_rate_floor(const std::optional<ModelParams>& params) {
  return eigenvalue(1) - (params ? params->lipschitz_onesided : 0.0);
}

McEstimate mc_weak_value(const SchemeConfig& cfg, const std::optional<ModelParams>& params,
                         const std::optional<NoiseSpectrum>& spectrum,
                         const SpectralField& u0, const FunctionalSpec& functional,
                         long samples, std::uint64_t master_seed, int threads) {
  if (samples < 2)
    throw std::invalid_argument("mc_weak_value: needs at least two samples");
  std::vector<double> phi(static_cast<size_t>(samples));
  std::vector<char> blown(static_cast<size_t>(samples), 0);
  const RngStream base(master_seed, 0);

  parallel_samples(samples, threads, [&](long i, int) {
    double last = 0.0;
    const auto blow = run_trajectory_visit(
        cfg, params, spectrum, u0, base.substream(static_cast<std::uint64_t>(i)),
        cfg.n_steps > 0 ? cfg.n_steps : 1,
        [&](long, double, std::span<const double> c) { last = functional.evaluate(c); });
    if (blow) blown[static_cast<size_t>(i)] = 1;
    phi[static_cast<size_t>(i)] = last;
  });

  McEstimate est;
  est.samples = samples;
  std::vector<double> kept;
  kept.reserve(phi.size());
  for (size_t i = 0; i < phi.size(); ++i) {
    if (blown[i]) ++est.blowups;
    else kept.push_back(phi[i]);
  }
  if (kept.size() < 2) {
    est.mean = std::numeric_limits<double>::quiet_NaN();
    est.standard_error = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  const MeanSe ms = mean_and_se(kept);
  est.mean = ms.mean;
  est.standard_error = ms.se;
  return est;
}

RateFit rate_regression(std::span<const double> log_x, std::span<const double> log_err,
                        std::span<const double> weights) {
  RateFit fit;
  const size_t n = log_x.size();
  if (n != log_err.size() || n != weights.size())
    throw std::invalid_argument("rate_regression: size mismatch");
  if (n < 3) return fit;
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double w = weights[i];
    sw += w;
    sx += w * log_x[i];
    sy += w * log_err[i];
    sxx += w * log_x[i] * log_x[i];
    sxy += w * log_x[i] * log_err[i];
  }
  const double det = sw * sxx - sx * sx;
  if (!(det > 0.0)) return fit;
  const double slope = (sw * sxy - sx * sy) / det;
  const double intercept = (sy - slope * sx) / sw;
  double ssr = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double r = log_err[i] - intercept - slope * log_x[i];
    ssr += weights[i] * r * r;
  }
  const double sigma2 = ssr / static_cast<double>(n - 2);
  fit.slope = slope;
  fit.halfwidth = 2.0 * std::sqrt(std::max(0.0, sigma2 * sw / det));
  fit.determinate = true;
  fit.points_used = static_cast<int>(n);
  return fit;
}

namespace {

long steps_for(double horizon, double tau, const char* what) {
  const double raw = horizon / tau;
  const long k = std::lround(raw);
  if (k < 1 || std::abs(raw - static_cast<double>(k)) > 1e-9 * std::max(1.0, raw))
    throw ConfigError(std::string(what) + ": horizon must be an integer multiple of tau");
  return k;
}

RateFit fit_above_floor(const std::vector<WeakErrorRow>& rows,
                        const std::vector<double>& xs) {
  std::vector<double> lx, ly, w;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].above_noise_floor) continue;
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(rows[i].error_vs_ref));
    const double se = rows[i].error_stderr;
    const double rel = se > 0.0 ? rows[i].error_vs_ref / se : 1e6;
    w.push_back(std::min(rel * rel, 1e12));
  }
  return rate_regression(lx, ly, w);
}

/// Shared engine for the temporal and spatial sweeps.
WeakErrorReport coupled_sweep(const std::vector<SchemeConfig>& levels,
                              const SchemeConfig& ref_cfg, const std::vector<double>& xs,
                              const std::optional<ModelParams>& params,
                              const NoiseSpectrum& spectrum, const SpectralField& u0,
                              const FunctionalSpec& functional, long samples,
                              std::uint64_t master_seed, int threads) {
  if (samples < 2) throw std::invalid_argument("coupled sweep: needs at least two samples");
  const size_t nl = levels.size();
  std::vector<std::vector<double>> lvl_phi(nl);
  for (auto& v : lvl_phi) v.resize(static_cast<size_t>(samples));
  std::vector<double> ref_phi(static_cast<size_t>(samples));
  std::vector<char> blown(static_cast<size_t>(samples), 0);
  const RngStream base(master_seed, 0);

  parallel_samples(samples, threads, [&](long i, int) {
    const CoupledLevels out = run_coupled_levels(
        levels, ref_cfg, params, spectrum, u0,
        base.substream(static_cast<std::uint64_t>(i)));
    if (out.blowup_step) {
      blown[static_cast<size_t>(i)] = 1;
      return;
    }
    ref_phi[static_cast<size_t>(i)] = functional.evaluate(out.ref_final.coeffs());
    for (size_t l = 0; l < nl; ++l)
      lvl_phi[l][static_cast<size_t>(i)] = functional.evaluate(out.level_finals[l].coeffs());
  });

  std::vector<size_t> kept;
  for (size_t i = 0; i < blown.size(); ++i)
    if (!blown[i]) kept.push_back(i);
  WeakErrorReport report;
  report.samples = samples;
  report.blowups = samples - static_cast<long>(kept.size());
  report.master_seed = master_seed;
  if (kept.size() < 2) throw BlowupError("coupled sweep: fewer than two finite samples", 0);

  auto collect = [&](const std::vector<double>& src) {
    std::vector<double> v(kept.size());
    for (size_t i = 0; i < kept.size(); ++i) v[i] = src[kept[i]];
    return v;
  };

  const std::vector<double> ref_kept = collect(ref_phi);
  const MeanSe ref_ms = mean_and_se(ref_kept);
  report.reference.tau = ref_cfg.tau;
  report.reference.n_modes = ref_cfg.n_modes;
  report.reference.mean = ref_ms.mean;
  report.reference.standard_error = ref_ms.se;

  for (size_t l = 0; l < nl; ++l) {
    const std::vector<double> phi = collect(lvl_phi[l]);
    std::vector<double> diff(phi.size());
    for (size_t i = 0; i < phi.size(); ++i) diff[i] = phi[i] - ref_kept[i];
    const MeanSe ms = mean_and_se(phi);
    const MeanSe dm = mean_and_se(diff);
    WeakErrorRow row;
    row.tau = levels[l].tau;
    row.n_modes = levels[l].n_modes;
    row.mean = ms.mean;
    row.standard_error = ms.se;
    row.error_vs_ref = std::abs(dm.mean);
    row.error_stderr = dm.se;
    row.above_noise_floor = row.error_vs_ref > 3.0 * row.error_stderr;
    report.rows.push_back(row);
  }
  report.rate = fit_above_floor(report.rows, xs);
  return report;
}

}  // namespace

WeakErrorReport weak_error_sweep(std::span<const double> tau_list, double tau_ref,
                                 double horizon, const SchemeConfig& base,
                                 const std::optional<ModelParams>& params,
                                 const NoiseSpectrum& spectrum, const SpectralField& u0,
                                 const FunctionalSpec& functional, long samples,
                                 std::uint64_t master_seed, int threads) {
  if (tau_list.empty()) throw ConfigError("weak_error_sweep: empty tau list");
  SchemeConfig ref_cfg = base;
  ref_cfg.tau = tau_ref;
  ref_cfg.n_steps = steps_for(horizon, tau_ref, "weak_error_sweep");
  std::vector<SchemeConfig> levels;
  std::vector<double> xs;
  for (double tau : tau_list) {
    const double ratio = tau / tau_ref;
    if (std::abs(ratio - std::lround(ratio)) > 1e-9 * ratio || std::lround(ratio) < 1)
      throw ConfigError("weak_error_sweep: every tau must be an integer multiple of tau_ref");
    SchemeConfig cfg = base;
    cfg.tau = tau;
    cfg.n_steps = steps_for(horizon, tau, "weak_error_sweep");
    levels.push_back(cfg);
    xs.push_back(tau);
  }
  return coupled_sweep(levels, ref_cfg, xs, params, spectrum, u0, functional, samples,
                       master_seed, threads);
}

WeakErrorReport spatial_error_sweep(std::span<const int> n_list, double tau, int n_ref,
                                    double horizon, const SchemeConfig& base,
                                    const std::optional<ModelParams>& params,
                                    const NoiseSpectrum& spectrum, const SpectralField& u0,
                                    const FunctionalSpec& functional, long samples,
                                    std::uint64_t master_seed, int threads) {
  if (n_list.empty()) throw ConfigError("spatial_error_sweep: empty N list");
  const int n_max = *std::max_element(n_list.begin(), n_list.end());
  if (n_ref < 4 * n_max)
    throw ConfigError("spatial_error_sweep: reference resolution must satisfy n_ref >= 4 max(N)");
  const long k = steps_for(horizon, tau, "spatial_error_sweep");
  SchemeConfig ref_cfg = base;
  ref_cfg.n_modes = n_ref;
  ref_cfg.tau = tau;
  ref_cfg.n_steps = k;
  std::vector<SchemeConfig> levels;
  std::vector<double> xs;
  for (int n : n_list) {
    SchemeConfig cfg = base;
    cfg.n_modes = n;
    cfg.tau = tau;
    cfg.n_steps = k;
    levels.push_back(cfg);
    xs.push_back(static_cast<double>(n));
  }
  NoiseSpectrum spec = spectrum;
  if (spec.n_modes < n_ref) spec.n_modes = n_ref;
  return coupled_sweep(levels, ref_cfg, xs, params, spec, u0, functional, samples,
                       master_seed, threads);
}

MomentCurve moment_curve(const SchemeConfig& cfg, const std::optional<ModelParams>& params,
                         const std::optional<NoiseSpectrum>& spectrum,
                         const SpectralField& u0, int p, long samples,
                         std::uint64_t master_seed, int threads, long save_stride,
                         double early_time) {
  if (p != 2 && p != 4 && p != 8)
    throw std::invalid_argument("moment_curve: p must be one of 2, 4, 8");
  if (samples < 1000)
    throw std::invalid_argument("moment_curve: needs at least 1000 samples");
  if (cfg.n_steps % save_stride != 0)
    throw std::invalid_argument("moment_curve: save_stride must divide n_steps");
  const size_t n_saves = static_cast<size_t>(cfg.n_steps / save_stride) + 1;
  std::vector<std::vector<double>> slots(n_saves);
  for (auto& v : slots) v.resize(static_cast<size_t>(samples));
  std::vector<char> blown(static_cast<size_t>(samples), 0);
  const RngStream base(master_seed, 0);
  const int nw = resolve_threads(threads);

  struct Scratch {
    const SineTable* table = nullptr;
    std::vector<double> phys;
  };
  std::vector<Scratch> scratch(static_cast<size_t>(nw));
  for (auto& s : scratch) {
    s.table = &sine_table(cfg.n_modes, 4 * cfg.n_modes);
    s.phys.resize(static_cast<size_t>(4 * cfg.n_modes));
  }

  parallel_samples(samples, nw, [&](long i, int w) {
    Scratch& s = scratch[static_cast<size_t>(w)];
    const auto blow = run_trajectory_visit(
        cfg, params, spectrum, u0, base.substream(static_cast<std::uint64_t>(i)),
        save_stride, [&](long step, double, std::span<const double> c) {
          to_physical(c, *s.table, s.phys);
          double sup = 0.0;
          for (double v : s.phys) sup = std::max(sup, std::abs(v));
          double value = sup * sup;                      // p = 2
          if (p >= 4) value *= value;                    // p = 4
          if (p == 8) value *= value;                    // p = 8
          slots[static_cast<size_t>(step / save_stride)][static_cast<size_t>(i)] = value;
        });
    if (blow) blown[static_cast<size_t>(i)] = 1;
  });

  MomentCurve curve;
  curve.p = p;
  curve.early_time = early_time;
  for (char b : blown) curve.blowups += b;
  if (curve.blowups > 0)
    return curve;  // divergence dominates any moment statement

  for (size_t s = 0; s < n_saves; ++s) {
    const MeanSe ms = mean_and_se(slots[s]);
    curve.times.push_back(static_cast<double>(s) * save_stride * cfg.tau);
    curve.estimate.push_back(ms.mean);
    curve.standard_error.push_back(ms.se);
  }

  const double t_end = curve.times.back();
  double early_sum = 0, late_sum = 0;
  long early_n = 0, late_n = 0;
  for (size_t s = 0; s < n_saves; ++s) {
    const double t = curve.times[s];
    if (t >= 0.9 * early_time && t <= 1.1 * early_time) {
      early_sum += curve.estimate[s];
      ++early_n;
    }
    if (t >= 0.9 * t_end) {
      late_sum += curve.estimate[s];
      ++late_n;
    }
  }
  if (early_n > 0 && late_n > 0 && early_sum > 0.0)
    curve.flatness = (late_sum / late_n) / (early_sum / early_n);
  return curve;
}

ErgodicFit ergodic_decay(const std::optional<ModelParams>& params,
                         const NoiseSpectrum& spectrum, const SchemeConfig& cfg,
                         const SpectralField& u0_a, const SpectralField& u0_b,
                         const FunctionalSpec& functional, long samples,
                         std::uint64_t master_seed, int threads, long save_stride) {
  if (samples < 2) throw std::invalid_argument("ergodic_decay: needs at least two samples");
  if (cfg.n_steps % save_stride != 0)
    throw std::invalid_argument("ergodic_decay: save_stride must divide n_steps");
  const size_t n_saves = static_cast<size_t>(cfg.n_steps / save_stride) + 1;
  std::vector<std::vector<double>> diff(n_saves);
  for (auto& v : diff) v.resize(static_cast<size_t>(samples));
  const RngStream base(master_seed, 0);

  parallel_samples(samples, threads, [&](long i, int) {
    const RngStream stream = base.substream(static_cast<std::uint64_t>(i));
    std::vector<double> phi_a(n_saves);
    run_trajectory_visit(cfg, params, spectrum, u0_a, stream, save_stride,
                         [&](long step, double, std::span<const double> c) {
                           phi_a[static_cast<size_t>(step / save_stride)] =
                               functional.evaluate(c);
                         });
    run_trajectory_visit(cfg, params, spectrum, u0_b, stream, save_stride,
                         [&](long step, double, std::span<const double> c) {
                           diff[static_cast<size_t>(step / save_stride)]
                               [static_cast<size_t>(i)] =
                                   phi_a[static_cast<size_t>(step / save_stride)] -
                                   functional.evaluate(c);
                         });
  });

  ErgodicFit fit;
  fit.floor = mixing_rate_floor(params);
  double gap_max = 0.0;
  for (size_t s = 0; s < n_saves; ++s) {
    const MeanSe ms = mean_and_se(diff[s]);
    fit.times.push_back(static_cast<double>(s) * save_stride * cfg.tau);
    fit.gap.push_back(std::abs(ms.mean));
    fit.gap_se.push_back(ms.se);
    gap_max = std::max(gap_max, std::abs(ms.mean));
  }

  std::vector<double> tx, ly, w;
  for (size_t s = 0; s < n_saves; ++s) {
    const double g = fit.gap[s];
    if (!(g > 3.0 * fit.gap_se[s])) continue;
    if (!(g > 1e-13 * gap_max)) continue;
    tx.push_back(fit.times[s]);
    ly.push_back(std::log(g));
    const double rel = fit.gap_se[s] > 0.0 ? g / fit.gap_se[s] : 1e6;
    w.push_back(std::min(rel * rel, 1e12));
  }
  const RateFit rate = rate_regression(tx, ly, w);  // x is plain time here
  if (rate.determinate) {
    fit.rho = -rate.slope;
    fit.halfwidth = rate.halfwidth;
    fit.determinate = true;
  }
  return fit;
}

InvariantEstimate invariant_measure_estimate(const SchemeConfig& cfg,
                                             const std::optional<ModelParams>& params,
                                             const std::optional<NoiseSpectrum>& spectrum,
                                             const SpectralField& u0,
                                             const FunctionalSpec& functional,
                                             double burn_in, long samples,
                                             std::uint64_t master_seed, int threads,
                                             long save_stride) {
  if (samples < 2)
    throw std::invalid_argument("invariant_measure_estimate: needs at least two samples");
  if (!(burn_in >= 0.0))
    throw std::invalid_argument("invariant_measure_estimate: burn_in must be >= 0");
  const double total_time = static_cast<double>(cfg.n_steps) * cfg.tau;
  if (!(total_time >= 2.0 * burn_in))
    throw ConfigError("invariant_measure_estimate: total horizon must cover twice the burn-in");

  InvariantEstimate est;
  est.burn_in = burn_in;
  est.burnin_warning = burn_in < 5.0 / mixing_rate_floor(params);

  std::vector<double> tavg(static_cast<size_t>(samples));
  std::vector<double> final_phi(static_cast<size_t>(samples));
  std::vector<char> blown(static_cast<size_t>(samples), 0);
  const RngStream base(master_seed, 0);

  parallel_samples(samples, threads, [&](long i, int) {
    double sum = 0.0;
    long count = 0;
    double last = 0.0;
    const auto blow = run_trajectory_visit(
        cfg, params, spectrum, u0, base.substream(static_cast<std::uint64_t>(i)),
        save_stride, [&](long, double t, std::span<const double> c) {
          last = functional.evaluate(c);
          if (t > burn_in) {
            sum += last;
            ++count;
          }
        });
    if (blow || count == 0) {
      blown[static_cast<size_t>(i)] = 1;
      return;
    }
    tavg[static_cast<size_t>(i)] = sum / static_cast<double>(count);
    final_phi[static_cast<size_t>(i)] = last;
  });

  std::vector<double> ta, fp, d;
  for (size_t i = 0; i < blown.size(); ++i) {
    if (blown[i]) {
      ++est.blowups;
      continue;
    }
    ta.push_back(tavg[i]);
    fp.push_back(final_phi[i]);
    d.push_back(tavg[i] - final_phi[i]);
  }
  if (ta.size() < 2)
    throw BlowupError("invariant_measure_estimate: fewer than two finite samples", 0);

  const MeanSe mt = mean_and_se(ta);
  const MeanSe me = mean_and_se(fp);
  const MeanSe md = mean_and_se(d);
  est.time_average = mt.mean;
  est.time_average_se = mt.se;
  est.ensemble_average = me.mean;
  est.ensemble_se = me.se;
  est.gap = std::abs(md.mean);
  est.gap_se = md.se;
  return est;
}

}  // namespace sace
