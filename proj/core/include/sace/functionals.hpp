#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

namespace sace {

/// Test functionals evaluated on Galerkin coefficients.
///   exp_neg_sq : Phi(v) = exp(-||v||^2)    (bounded C^2 class)
///   mode_k     : Phi(v) = <v, phi_k>       (Lipschitz class)
///   cos_mode   : Phi(v) = cos(<v, phi_1>)  (bounded C^2 class)
struct FunctionalSpec {
  enum class Kind { exp_neg_sq, mode_k, cos_mode };

  Kind kind = Kind::exp_neg_sq;
  int mode_index = 1;  // only for mode_k

  static FunctionalSpec exp_neg_sq() { return {Kind::exp_neg_sq, 1}; }
  static FunctionalSpec mode(int k) {
    if (k < 1) throw std::invalid_argument("FunctionalSpec: mode index starts at 1");
    return {Kind::mode_k, k};
  }
  static FunctionalSpec cos_mode() { return {Kind::cos_mode, 1}; }

  double evaluate(std::span<const double> coeffs) const {
    switch (kind) {
      case Kind::exp_neg_sq: {
        double s = 0.0;
        for (double c : coeffs) s += c * c;
        return std::exp(-s);
      }
      case Kind::mode_k: {
        const size_t i = static_cast<size_t>(mode_index) - 1;
        return i < coeffs.size() ? coeffs[i] : 0.0;
      }
      case Kind::cos_mode:
        return std::cos(coeffs[0]);
    }
    return 0.0;
  }
};

}  // namespace sace
