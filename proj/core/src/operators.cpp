#include "sace/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace sace {

double one_sided_lipschitz(double a1, double a2, double a3) {
  if (!(a3 > 0.0)) throw std::domain_error("one_sided_lipschitz: requires a3 > 0");
  return a1 + (a2 * a2) / (3.0 * a3);
}

ModelParams::ModelParams(double a0, double a1, double a2, double a3)
    : a0(a0), a1(a1), a2(a2), a3(a3),
      lipschitz_onesided(one_sided_lipschitz(a1, a2, a3)) {}

SpectralField semigroup_apply(const SpectralField& field, double t) {
  if (!(t >= 0.0)) throw std::domain_error("semigroup_apply: t must be >= 0");
  std::vector<double> c(field.coeffs().begin(), field.coeffs().end());
  for (int k = 1; k <= field.n_modes(); ++k)
    c[static_cast<size_t>(k) - 1] *= std::exp(-eigenvalue(k) * t);
  return SpectralField(std::move(c));
}

double phi_multiplier(double lambda, double tau) {
  return -std::expm1(-lambda * tau) / lambda;
}

SpectralField phi_operator(const SpectralField& field, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("phi_operator: tau must be > 0");
  std::vector<double> c(field.coeffs().begin(), field.coeffs().end());
  for (int k = 1; k <= field.n_modes(); ++k)
    c[static_cast<size_t>(k) - 1] *= phi_multiplier(eigenvalue(k), tau);
  return SpectralField(std::move(c));
}

SpectralField nemytskii(const SpectralField& field, const ModelParams& params,
                        const CollocationGrid& grid) {
  if (grid.m_points < 4 * field.n_modes())
    throw std::invalid_argument("nemytskii: requires oversampling m >= 4 N");
  std::vector<double> values = to_physical(field, grid);
  for (double& v : values) v = params.f(v);
  return to_spectral(values, grid, field.n_modes());
}

double taming_from_norms(double sup, double sobolev_beta, double tau_pow_beta) {
  const double s2 = sup * sup;
  const double s6 = s2 * s2 * s2;
  const double h2 = sobolev_beta * sobolev_beta;
  const double h6 = h2 * h2 * h2;
  return 1.0 / (1.0 + tau_pow_beta * s6 + tau_pow_beta * h6);
}

double taming_factor(const SpectralField& field, double tau, double beta,
                     const CollocationGrid& grid) {
  if (!(tau > 0.0)) throw std::domain_error("taming_factor: tau must be > 0");
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::domain_error("taming_factor: beta must lie in (0,1]");
  const double sup = sup_norm(field, grid);
  const double h = sobolev_norm(field, beta);
  return taming_from_norms(sup, h, std::pow(tau, beta));
}

}  // namespace sace
