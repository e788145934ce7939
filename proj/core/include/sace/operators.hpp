#pragma once

#include "sace/spectral.hpp"

namespace sace {

/// Largest slope of the cubic drift f(x) = -a3 x^3 + a2 x^2 + a1 x + a0,
/// i.e. sup_x f'(x) = a1 + a2^2/(3 a3). Requires a3 > 0.
double one_sided_lipschitz(double a1, double a2, double a3);

/// Cubic reaction polynomial with a3 > 0 and its cached one-sided
/// Lipschitz constant. Dissipativity (L_F < lambda_1) is enforced where
/// trajectories start, not here.
struct ModelParams {
  ModelParams(double a0, double a1, double a2, double a3);

  double a0, a1, a2, a3;
  double lipschitz_onesided;

  double f(double x) const { return a0 + x * (a1 + x * (a2 + x * (-a3))); }
};

/// Heat semigroup e^{-tA}: per-mode decay e^{-lambda_k t}. t >= 0.
SpectralField semigroup_apply(const SpectralField& field, double t);

/// Integrated-drift operator A^{-1}(I - e^{-tau A}): per-mode multiplier
/// (1 - e^{-lambda_k tau}) / lambda_k. tau > 0.
SpectralField phi_operator(const SpectralField& field, double tau);
double phi_multiplier(double lambda, double tau);

/// Projected Nemytskii drift P_N f(v): pointwise f on the grid followed by
/// sine analysis. Requires m >= 4 N, which makes the cubic alias-free.
SpectralField nemytskii(const SpectralField& field, const ModelParams& params,
                        const CollocationGrid& grid);

/// Taming factor 1 / (1 + tau^beta ||v||_inf^6 + tau^beta ||v||_{H^beta}^6),
/// always in (0,1]. beta in (0,1].
double taming_factor(const SpectralField& field, double tau, double beta,
                     const CollocationGrid& grid);

/// Shared by taming_factor and the fused stepper so both compute
/// bit-identical values.
double taming_from_norms(double sup, double sobolev_beta, double tau_pow_beta);

}  // namespace sace
