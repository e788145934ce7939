#include "sace/spectral.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace sace {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double eigenvalue(int k) {
  if (k < 1) throw std::domain_error("eigenvalue: mode index starts at 1");
  const double kk = static_cast<double>(k) * static_cast<double>(k);
  return kk * (kPi * kPi);
}

double eigenfunction_value(int k, double x) {
  if (k < 1) throw std::domain_error("eigenfunction_value: mode index starts at 1");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("eigenfunction_value: x outside [0,1]");
  return std::sqrt(2.0) * std::sin(static_cast<double>(k) * kPi * x);
}

SpectralField::SpectralField(int n_modes) {
  if (n_modes < 1) throw std::invalid_argument("SpectralField: n_modes must be positive");
  coeffs_.assign(static_cast<size_t>(n_modes), 0.0);
}

SpectralField::SpectralField(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("SpectralField: empty coefficient vector");
  for (double c : coeffs_)
    if (!std::isfinite(c))
      throw std::invalid_argument("SpectralField: non-finite coefficient");
}

SpectralField SpectralField::unit_mode(int n_modes, int k) {
  SpectralField f(n_modes);
  if (k < 1 || k > n_modes) throw std::invalid_argument("unit_mode: k outside 1..N");
  f.coeffs_[static_cast<size_t>(k) - 1] = 1.0;
  return f;
}

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
  if (a.n_modes() != b.n_modes()) throw std::invalid_argument("field sizes differ");
  std::vector<double> c(a.coeffs_);
  for (size_t i = 0; i < c.size(); ++i) c[i] += b.coeffs_[i];
  return SpectralField(std::move(c));
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
  if (a.n_modes() != b.n_modes()) throw std::invalid_argument("field sizes differ");
  std::vector<double> c(a.coeffs_);
  for (size_t i = 0; i < c.size(); ++i) c[i] -= b.coeffs_[i];
  return SpectralField(std::move(c));
}

SpectralField operator*(double s, const SpectralField& a) {
  std::vector<double> c(a.coeffs_);
  for (double& v : c) v *= s;
  return SpectralField(std::move(c));
}

CollocationGrid::CollocationGrid(int m) : m_points(m) {
  if (m < 1) throw std::invalid_argument("CollocationGrid: m_points must be positive");
}

double CollocationGrid::abscissa(int j) const {
  return static_cast<double>(j) / static_cast<double>(m_points + 1);
}

namespace {

std::unique_ptr<SineTable> build_table(int n_modes, int m_points) {
  auto t = std::make_unique<SineTable>();
  t->n_modes = n_modes;
  t->m_points = m_points;
  t->synth.resize(static_cast<size_t>(n_modes) * m_points);
  t->analysis.resize(static_cast<size_t>(m_points) * n_modes);
  const CollocationGrid grid(m_points);
  for (int k = 1; k <= n_modes; ++k)
    for (int j = 1; j <= m_points; ++j)
      t->synth[static_cast<size_t>(k - 1) * m_points + (j - 1)] =
          eigenfunction_value(k, grid.abscissa(j));
  for (int j = 0; j < m_points; ++j)
    for (int k = 0; k < n_modes; ++k)
      t->analysis[static_cast<size_t>(j) * n_modes + k] =
          t->synth[static_cast<size_t>(k) * m_points + j];
  return t;
}

std::mutex table_mutex;
std::map<std::pair<int, int>, std::unique_ptr<SineTable>> table_cache;

}  // namespace

const SineTable& sine_table(int n_modes, int m_points) {
  if (n_modes < 1 || m_points < n_modes)
    throw std::invalid_argument("sine_table: need 1 <= n_modes <= m_points");
  std::lock_guard<std::mutex> lock(table_mutex);
  auto& slot = table_cache[{n_modes, m_points}];
  if (!slot) slot = build_table(n_modes, m_points);
  return *slot;
}

void to_physical(std::span<const double> coeffs, const SineTable& table,
                 std::span<double> values) {
  const int n = table.n_modes, m = table.m_points;
  for (int j = 0; j < m; ++j) values[j] = 0.0;
  for (int k = 0; k < n; ++k) {
    const double c = coeffs[k];
    const double* row = table.synth.data() + static_cast<size_t>(k) * m;
    for (int j = 0; j < m; ++j) values[j] += c * row[j];
  }
}

std::vector<double> to_physical(const SpectralField& field, const CollocationGrid& grid) {
  if (grid.m_points < field.n_modes())
    throw std::invalid_argument("to_physical: grid has fewer points than modes");
  std::vector<double> values(static_cast<size_t>(grid.m_points));
  to_physical(field.coeffs(), sine_table(field.n_modes(), grid.m_points), values);
  return values;
}

void to_spectral(std::span<const double> values, const SineTable& table,
                 std::span<double> coeffs) {
  const int n = table.n_modes, m = table.m_points;
  for (int k = 0; k < n; ++k) coeffs[k] = 0.0;
  for (int j = 0; j < m; ++j) {
    const double v = values[j];
    const double* row = table.analysis.data() + static_cast<size_t>(j) * n;
    for (int k = 0; k < n; ++k) coeffs[k] += v * row[k];
  }
  const double w = 1.0 / static_cast<double>(m + 1);
  for (int k = 0; k < n; ++k) coeffs[k] *= w;
}

SpectralField to_spectral(std::span<const double> values, const CollocationGrid& grid,
                          int n_modes) {
  if (static_cast<int>(values.size()) != grid.m_points)
    throw std::invalid_argument("to_spectral: value count does not match grid");
  if (grid.m_points < n_modes)
    throw std::invalid_argument("to_spectral: grid has fewer points than requested modes");
  std::vector<double> coeffs(static_cast<size_t>(n_modes));
  to_spectral(values, sine_table(n_modes, grid.m_points), coeffs);
  return SpectralField(std::move(coeffs));
}

double sobolev_norm(std::span<const double> coeffs, std::span<const double> lambda_pow_s) {
  double acc = 0.0;
  for (size_t k = 0; k < coeffs.size(); ++k)
    acc += lambda_pow_s[k] * (coeffs[k] * coeffs[k]);
  return std::sqrt(acc);
}

double sobolev_norm(const SpectralField& field, double s) {
  std::vector<double> w(static_cast<size_t>(field.n_modes()));
  for (int k = 1; k <= field.n_modes(); ++k)
    w[static_cast<size_t>(k) - 1] = std::pow(eigenvalue(k), s);
  return sobolev_norm(field.coeffs(), w);
}

double sup_norm(const SpectralField& field, const CollocationGrid& grid) {
  if (grid.m_points < 4 * field.n_modes())
    throw std::invalid_argument("sup_norm: requires oversampling m >= 4 N");
  const SineTable& table = sine_table(field.n_modes(), grid.m_points);
  std::vector<double> values(static_cast<size_t>(grid.m_points));
  to_physical(field.coeffs(), table, values);
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace sace
