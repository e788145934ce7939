// Acceptance suite: quantitative checks of the scheme's statistical
// behavior at desk scale. Each criterion prints exactly one PASS/FAIL
// line; the process exits nonzero if any selected criterion fails.
//
//   sace_acceptance [criterion ...]     (default: all, 1-8)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sace/analysis.hpp"
#include "sace/experiments.hpp"
#include "sace/parallel.hpp"

using namespace sace;

namespace {

int g_threads = 0;

SchemeConfig make_cfg(int n, double tau, long steps, double beta,
                      SchemeVariant variant = SchemeVariant::tamed_exp_euler) {
  SchemeConfig cfg;
  cfg.n_modes = n;
  cfg.tau = tau;
  cfg.n_steps = steps;
  cfg.beta = beta;
  cfg.variant = variant;
  return cfg;
}

const ModelParams kBenchmarkDrift{0.0, 1.0, 0.0, 1.0};  // f(x) = x - x^3, L_F = 1

struct Line {
  std::ostringstream detail;
  bool pass = true;

  void require(bool ok) { pass = pass && ok; }
};

// 1. Drift-free exactness: with F disabled the scheme samples the exact
// Gaussian law of the stochastic convolution at every grid time. First 8
// mode variances at T = 5 match q_k(1-e^{-2 lambda_k T})/(2 lambda_k)
// within 4 standard errors at M = 1e5.
bool criterion_1(std::ostream& out) {
  const int n = 64, checked = 8;
  const double tau = 0.1;
  const long steps = 50, samples = 100000;
  const NoiseSpectrum spec(NoiseKind::power_law, 1.0, 1.0, n);
  const SchemeConfig cfg = make_cfg(n, tau, steps, 1.0);

  std::vector<std::vector<double>> coeff(checked);
  for (auto& v : coeff) v.resize(static_cast<size_t>(samples));
  const RngStream base(20260810, 0);
  parallel_samples(samples, g_threads, [&](long i, int) {
    run_trajectory_visit(cfg, std::nullopt, spec, SpectralField(n),
                         base.substream(static_cast<std::uint64_t>(i)), steps,
                         [&](long step, double, std::span<const double> c) {
                           if (step == steps)
                             for (int k = 0; k < checked; ++k)
                               coeff[static_cast<size_t>(k)][static_cast<size_t>(i)] =
                                   c[static_cast<size_t>(k)];
                         });
  });

  const double T = tau * static_cast<double>(steps);
  Line line;
  double worst = 0.0;
  for (int k = 1; k <= checked; ++k) {
    const std::vector<double>& c = coeff[static_cast<size_t>(k - 1)];
    const MeanSe mean = mean_and_se(c);
    std::vector<double> centered(c.size());
    for (size_t i = 0; i < c.size(); ++i) {
      const double d = c[i] - mean.mean;
      centered[i] = d * d;
    }
    const double var = pairwise_sum(centered) / static_cast<double>(c.size() - 1);
    const double exact =
        spec.q(k) * (-std::expm1(-2.0 * eigenvalue(k) * T)) / (2.0 * eigenvalue(k));
    const double se = exact * std::sqrt(2.0 / static_cast<double>(samples - 1));
    const double dev = std::abs(var - exact) / se;
    worst = std::max(worst, dev);
    line.require(dev <= 4.0);
  }
  out << (line.pass ? "PASS" : "FAIL")
      << " criterion 1: drift-free mode variances exact, worst deviation "
      << worst << " SE (limit 4)\n";
  return line.pass;
}

// 2./3. Temporal weak rate against a coupled fine reference.
bool temporal_rate(std::ostream& out, int which, const NoiseSpectrum& spec, double beta,
                   double lo, double hi) {
  const int n = 64;
  const std::vector<double> taus = {0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625};
  const double tau_ref = 1.0 / 2048.0;
  const SchemeConfig base = make_cfg(n, taus.front(), 0, beta);
  const WeakErrorReport rep =
      weak_error_sweep(taus, tau_ref, 1.0, base, kBenchmarkDrift, spec, SpectralField(n),
                       FunctionalSpec::exp_neg_sq(), 10000, 31415, g_threads);
  const bool pass = rep.rate.determinate && rep.rate.slope >= lo && rep.rate.slope <= hi;
  out << (pass ? "PASS" : "FAIL") << " criterion " << which
      << ": temporal weak rate " << (rep.rate.determinate ? rep.rate.slope : 0.0)
      << " in [" << lo << ", " << hi << "], " << rep.rate.points_used
      << " points above noise floor\n";
  return pass;
}

bool criterion_2(std::ostream& out) {
  return temporal_rate(out, 2, NoiseSpectrum(NoiseKind::power_law, 1.0, 1.0, 64), 1.0, 0.7, 1.3);
}

bool criterion_3(std::ostream& out) {
  return temporal_rate(out, 3, NoiseSpectrum(NoiseKind::white, 0.0, 0.5, 64), 0.5, 0.3, 0.75);
}

// 4. Spatial weak rate. The taming denominator carries the resolved
// H^beta mass, which varies with N at fixed tau and buries the projection
// term, so the sweep runs the untamed control; the spectrum decay 0.75
// keeps the noise trace-class for beta = 1 while leaving the projection
// tail observable over N = 4..32.
bool criterion_4(std::ostream& out) {
  const std::vector<int> n_list = {4, 8, 16, 32};
  const int n_ref = 256;
  const double tau = 1.0 / 256.0;
  const NoiseSpectrum spec(NoiseKind::power_law, 0.75, 1.0, n_ref);
  const SchemeConfig base = make_cfg(4, tau, 0, 1.0, SchemeVariant::untamed_exp_euler);
  const WeakErrorReport rep =
      spatial_error_sweep(n_list, tau, n_ref, 1.0, base, kBenchmarkDrift, spec,
                          SpectralField(n_ref), FunctionalSpec::exp_neg_sq(), 2000, 27182,
                          g_threads);
  const bool pass =
      rep.rate.determinate && rep.rate.slope >= -2.6 && rep.rate.slope <= -1.4;
  out << (pass ? "PASS" : "FAIL") << " criterion 4: spatial slope "
      << (rep.rate.determinate ? rep.rate.slope : 0.0)
      << " in [-2.6, -1.4], " << rep.rate.points_used << " points above noise floor\n";
  return pass;
}

// 5. Time-uniform moments plus the divergence control.
bool criterion_5(std::ostream& out) {
  const int n = 64;
  const double tau = 0.1;
  const NoiseSpectrum spec(NoiseKind::power_law, 1.0, 1.0, n);
  const SchemeConfig cfg = make_cfg(n, tau, 500, 1.0);  // T = 50

  Line line;
  double flat2 = 0.0, flat4 = 0.0;
  for (int p : {2, 4}) {
    const MomentCurve curve = moment_curve(cfg, kBenchmarkDrift, spec, SpectralField(n), p,
                                           2000, 777, g_threads, 5, 5.0);
    line.require(curve.blowups == 0);
    line.require(curve.flatness > 0.0 && curve.flatness <= 1.5);
    (p == 2 ? flat2 : flat4) = curve.flatness;
  }

  // untamed control from a 1000x initial state diverges fast
  std::vector<double> huge(static_cast<size_t>(n), 0.0);
  huge[0] = 1000.0 / std::sqrt(2.0);
  const SpectralField u0{std::vector<double>(huge)};
  SchemeConfig control = make_cfg(n, tau, 50, 1.0, SchemeVariant::untamed_exp_euler);
  const TrajectoryRecord untamed = run_trajectory(control, kBenchmarkDrift, spec, u0,
                                                  FunctionalSpec::mode(1), RngStream(777, 0), 1);
  line.require(untamed.blowup_step.has_value() && *untamed.blowup_step <= 10);

  control.variant = SchemeVariant::tamed_exp_euler;
  const TrajectoryRecord tamed = run_trajectory(control, kBenchmarkDrift, spec, u0,
                                                FunctionalSpec::mode(1), RngStream(777, 0), 1);
  line.require(!tamed.blowup_step.has_value());

  out << (line.pass ? "PASS" : "FAIL")
      << " criterion 5: moment flatness p2 = " << flat2 << ", p4 = " << flat4
      << " (limit 1.5); untamed control diverged "
      << (untamed.blowup_step ? "step " + std::to_string(*untamed.blowup_step) : "never")
      << ", tamed stayed finite\n";
  return line.pass;
}

// 6. Exponential ergodicity: exact lambda_1 decay without drift,
// rate above 0.8 (lambda_1 - L_F) with the benchmark drift.
bool criterion_6(std::ostream& out) {
  const int n = 32;
  const NoiseSpectrum spec(NoiseKind::power_law, 1.0, 1.0, n);

  const SchemeConfig lin = make_cfg(n, 0.02, 50, 1.0);
  const ErgodicFit free_fit =
      ergodic_decay(std::nullopt, spec, lin, SpectralField::unit_mode(n, 1), SpectralField(n),
                    FunctionalSpec::mode(1), 8, 515, g_threads, 1);
  const bool free_ok = free_fit.determinate &&
                       std::abs(free_fit.rho - eigenvalue(1)) <= 0.02 * eigenvalue(1);

  const SchemeConfig cfg = make_cfg(n, 0.02, 60, 1.0);  // T = 1.2
  const ErgodicFit fit =
      ergodic_decay(kBenchmarkDrift, spec, cfg, SpectralField::unit_mode(n, 1),
                    SpectralField(n), FunctionalSpec::mode(1), 4000, 616, g_threads, 1);
  const double floor = eigenvalue(1) - 1.0;
  const bool nl_ok = fit.determinate && fit.rho >= 0.8 * floor;

  const bool pass = free_ok && nl_ok;
  out << (pass ? "PASS" : "FAIL") << " criterion 6: drift-free rho = " << free_fit.rho
      << " vs lambda_1 = " << eigenvalue(1) << " (2% band); benchmark rho = " << fit.rho
      << " >= 0.8 (lambda_1 - L_F) = " << 0.8 * floor << "\n";
  return pass;
}

// 7. Invariant-measure consistency: stationary Gaussian closed form
// without drift; time/ensemble agreement and seed stability with it.
bool criterion_7(std::ostream& out) {
  const int n = 64;
  const NoiseSpectrum spec(NoiseKind::power_law, 1.0, 1.0, n);
  const SchemeConfig cfg = make_cfg(n, 0.05, 220, 1.0);  // T = 11
  const double burn_in = 1.0;
  const long samples = 400;

  Line line;
  const InvariantEstimate free_est = invariant_measure_estimate(
      cfg, std::nullopt, spec, SpectralField(n), FunctionalSpec::exp_neg_sq(), burn_in,
      samples, 99, g_threads, 1);
  double oracle = 1.0;
  for (int k = 1; k <= n; ++k) oracle /= std::sqrt(1.0 + spec.q(k) / eigenvalue(k));
  line.require(std::abs(free_est.time_average - oracle) <= 4.0 * free_est.time_average_se);
  line.require(std::abs(free_est.ensemble_average - oracle) <= 4.0 * free_est.ensemble_se);

  const InvariantEstimate bench = invariant_measure_estimate(
      cfg, kBenchmarkDrift, spec, SpectralField(n), FunctionalSpec::exp_neg_sq(), burn_in,
      samples, 99, g_threads, 1);
  line.require(bench.gap <= 4.0 * bench.gap_se);

  const InvariantEstimate bench2 = invariant_measure_estimate(
      cfg, kBenchmarkDrift, spec, SpectralField(n), FunctionalSpec::exp_neg_sq(), burn_in,
      samples, 100, g_threads, 1);
  const double comb = std::sqrt(bench.time_average_se * bench.time_average_se +
                                bench2.time_average_se * bench2.time_average_se);
  line.require(std::abs(bench.time_average - bench2.time_average) <= 4.0 * comb);

  out << (line.pass ? "PASS" : "FAIL")
      << " criterion 7: drift-free averages vs closed form "
      << free_est.time_average << " / " << free_est.ensemble_average << " vs " << oracle
      << "; benchmark time/ensemble gap " << bench.gap << " <= " << 4.0 * bench.gap_se
      << "; seed-stable\n";
  return line.pass;
}

// 8. Algebraic identity suite via self-test, under ten seconds.
bool criterion_8(std::ostream& out) {
  std::ostringstream sink;
  const auto start = std::chrono::steady_clock::now();
  const int failures = run_self_test(sink);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool pass = failures == 0 && secs < 10.0;
  out << (pass ? "PASS" : "FAIL") << " criterion 8: identity suite " << failures
      << " failures in " << secs << " s (limit 10 s)\n";
  if (failures != 0) out << sink.str();
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--threads" && i + 1 < argc) {
      g_threads = std::atoi(argv[++i]);
      continue;
    }
    which.push_back(std::atoi(arg.c_str()));
  }
  if (which.empty()) which = {1, 2, 3, 4, 5, 6, 7, 8};

  bool all = true;
  for (int c : which) {
    bool ok = false;
    switch (c) {
      case 1: ok = criterion_1(std::cout); break;
      case 2: ok = criterion_2(std::cout); break;
      case 3: ok = criterion_3(std::cout); break;
      case 4: ok = criterion_4(std::cout); break;
      case 5: ok = criterion_5(std::cout); break;
      case 6: ok = criterion_6(std::cout); break;
      case 7: ok = criterion_7(std::cout); break;
      case 8: ok = criterion_8(std::cout); break;
      default:
        std::cout << "FAIL criterion " << c << ": no such criterion\n";
    }
    all = all && ok;
  }
  return all ? 0 : 1;
}
