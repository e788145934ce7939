#include "sace/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace sace {

NoiseSpectrum::NoiseSpectrum(NoiseKind kind, double decay, double beta, int n_modes)
    : kind(kind), decay(decay), beta(beta), n_modes(n_modes) {
  if (kind == NoiseKind::white) this->decay = 0.0;
  if (!(this->decay >= 0.0))
    throw std::invalid_argument("NoiseSpectrum: decay must be >= 0");
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("NoiseSpectrum: beta must lie in (0,1]");
  if (n_modes < 1) throw std::invalid_argument("NoiseSpectrum: n_modes must be positive");
}

double NoiseSpectrum::q(int k) const {
  if (kind == NoiseKind::white) return 1.0;
  return std::pow(static_cast<double>(k), -2.0 * decay);
}

RegularityReport regularity_check(const NoiseSpectrum& spectrum) {
  const double tail = 2.0 * (spectrum.beta - 1.0) - 2.0 * spectrum.decay;
  double partial = 0.0;
  for (int k = 1; k <= spectrum.n_modes; ++k)
    partial += std::pow(eigenvalue(k), spectrum.beta - 1.0) * spectrum.q(k);
  const double eps = 1e-12;
  RegularityReport r;
  r.tail_exponent = tail;
  r.at_boundary = std::abs(tail + 1.0) <= eps;
  r.admissible = tail < -1.0 + eps;
  r.partial_sum = partial;
  return r;
}

double increment_sigma(double q, double lambda, double tau) {
  return std::sqrt(q * (-std::expm1(-2.0 * lambda * tau)) / (2.0 * lambda));
}

std::vector<double> increment_sigmas(const NoiseSpectrum& spectrum, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("increment_sigmas: tau must be > 0");
  std::vector<double> s(static_cast<size_t>(spectrum.n_modes));
  for (int k = 1; k <= spectrum.n_modes; ++k)
    s[static_cast<size_t>(k) - 1] = increment_sigma(spectrum.q(k), eigenvalue(k), tau);
  return s;
}

SpectralField convolution_increment(const NoiseSpectrum& spectrum, double tau,
                                    const RngStream& rng, std::uint64_t step_index) {
  const std::vector<double> sigma = increment_sigmas(spectrum, tau);
  std::vector<double> g(sigma.size());
  rng.fill_gaussians(DrawTag::convolution_increment, step_index, g);
  for (size_t k = 0; k < g.size(); ++k) g[k] *= sigma[k];
  return SpectralField(std::move(g));
}

SpectralField refine_coupling(const std::vector<SpectralField>& fine_increments,
                              double tau_fine) {
  if (fine_increments.empty())
    throw std::invalid_argument("refine_coupling: needs at least one increment");
  const int n = fine_increments.front().n_modes();
  std::vector<double> decay(static_cast<size_t>(n));
  for (int k = 1; k <= n; ++k)
    decay[static_cast<size_t>(k) - 1] = std::exp(-eigenvalue(k) * tau_fine);
  std::vector<double> acc(fine_increments.front().coeffs().begin(),
                          fine_increments.front().coeffs().end());
  for (size_t j = 1; j < fine_increments.size(); ++j) {
    const auto& inc = fine_increments[j];
    if (inc.n_modes() != n)
      throw std::invalid_argument("refine_coupling: mode counts differ");
    for (int k = 0; k < n; ++k)
      acc[static_cast<size_t>(k)] =
          decay[static_cast<size_t>(k)] * acc[static_cast<size_t>(k)] + inc.coeffs()[k];
  }
  return SpectralField(std::move(acc));
}

SpectralField stationary_convolution_sample(const NoiseSpectrum& spectrum,
                                            const RngStream& rng, std::uint64_t index) {
  if (!regularity_check(spectrum).admissible)
    throw std::domain_error("stationary_convolution_sample: inadmissible spectrum");
  std::vector<double> g(static_cast<size_t>(spectrum.n_modes));
  rng.fill_gaussians(DrawTag::stationary_sample, index, g);
  for (int k = 1; k <= spectrum.n_modes; ++k)
    g[static_cast<size_t>(k) - 1] *=
        std::sqrt(spectrum.q(k) / (2.0 * eigenvalue(k)));
  return SpectralField(std::move(g));
}

}  // namespace sace
