#pragma once

#include <span>
#include <vector>

namespace sace {

/// lambda_k = k^2 pi^2, the Dirichlet Laplacian eigenvalue of mode k >= 1.
double eigenvalue(int k);

/// phi_k(x) = sqrt(2) sin(k pi x) on the unit interval, x in [0,1].
double eigenfunction_value(int k, double x);

struct Eigenpair {
  int k;
  double lambda;
};

inline Eigenpair eigenpair(int k) { return {k, eigenvalue(k)}; }

/// An element of the Galerkin space H^N: coeffs[k-1] = <v, phi_k>.
/// Immutable after construction; construction rejects non-finite entries.
class SpectralField {
 public:
  explicit SpectralField(int n_modes);              // zero field
  explicit SpectralField(std::vector<double> coeffs);

  static SpectralField unit_mode(int n_modes, int k);

  int n_modes() const { return static_cast<int>(coeffs_.size()); }
  std::span<const double> coeffs() const& { return coeffs_; }
  std::span<const double> coeffs() const&& = delete;  // would dangle
  /// 1-based mode coefficient <v, phi_k>.
  double mode(int k) const { return coeffs_[static_cast<size_t>(k) - 1]; }

  friend SpectralField operator+(const SpectralField& a, const SpectralField& b);
  friend SpectralField operator-(const SpectralField& a, const SpectralField& b);
  friend SpectralField operator*(double s, const SpectralField& a);

 private:
  std::vector<double> coeffs_;
};

/// Uniform collocation grid x_j = j/(m+1), j = 1..m, interior of (0,1).
struct CollocationGrid {
  explicit CollocationGrid(int m_points);
  int m_points;
  double abscissa(int j) const;  // 1-based
};

/// Precomputed sine tables for one (n_modes, m_points) pairing.
/// synth is row-major (k, j) with entry phi_k(x_j); analysis is its
/// transpose, stored separately so both transform directions stream rows.
struct SineTable {
  int n_modes = 0;
  int m_points = 0;
  std::vector<double> synth;     // n_modes * m_points
  std::vector<double> analysis;  // m_points * n_modes
};

/// Shared immutable table for (n_modes, m_points); built once, cached.
const SineTable& sine_table(int n_modes, int m_points);

/// Basis synthesis v(x_j) = sum_k coeffs[k] phi_k(x_j). Requires m >= N.
std::vector<double> to_physical(const SpectralField& field, const CollocationGrid& grid);
void to_physical(std::span<const double> coeffs, const SineTable& table, std::span<double> values);

/// Discrete sine analysis c_k = (1/(m+1)) sum_j v(x_j) phi_k(x_j).
/// Inverse of to_physical on the first N modes whenever m >= N; modes above
/// N are discarded (spectral projection).
SpectralField to_spectral(std::span<const double> values, const CollocationGrid& grid, int n_modes);
void to_spectral(std::span<const double> values, const SineTable& table, std::span<double> coeffs);

/// Fractional Sobolev norm (sum_k lambda_k^s coeffs[k]^2)^(1/2); s = 0 is L2.
double sobolev_norm(const SpectralField& field, double s);
double sobolev_norm(std::span<const double> coeffs, std::span<const double> lambda_pow_s);

/// max_j |v(x_j)| over the grid; requires oversampling m >= 4 N.
double sup_norm(const SpectralField& field, const CollocationGrid& grid);

}  // namespace sace
