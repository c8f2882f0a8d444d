#include "edtlab/chebyshev.hpp"

#include <cmath>
#include <numbers>

namespace edtlab {

namespace {

// Legendre P_n and its derivative by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

const CellBasis& CellBasis::get() {
  static const CellBasis basis;
  return basis;
}

CellBasis::CellBasis() {
  constexpr double pi = std::numbers::pi;
  for (int j = 0; j < kNodes; ++j) {
    nodes_[j] = -std::cos(pi * j / (kNodes - 1));
    bary_[j] = (j % 2 == 0) ? 1.0 : -1.0;
  }
  nodes_[0] = -1.0;
  nodes_[kNodes - 1] = 1.0;
  bary_[0] *= 0.5;
  bary_[kNodes - 1] *= 0.5;

  for (int g = 0; g < kGauss; ++g) {
    double x = -std::cos(pi * (g + 0.75) / (kGauss + 0.5));
    double p = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      legendre(kGauss, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    legendre(kGauss, x, p, dp);
    gauss_nodes_[g] = x;
    gauss_weights_[g] = 2.0 / ((1.0 - x * x) * dp * dp);
  }

  integral_weights_.fill(0.0);
  for (int g = 0; g < kGauss; ++g) {
    const Row row = lagrange_row(gauss_nodes_[g]);
    for (int j = 0; j < kNodes; ++j) integral_weights_[j] += gauss_weights_[g] * row[j];
  }
}

CellBasis::Row CellBasis::lagrange_row(double x) const noexcept {
  Row row{};
  double denom = 0.0;
  for (int j = 0; j < kNodes; ++j) {
    const double d = x - nodes_[j];
    if (d == 0.0) {
      row.fill(0.0);
      row[j] = 1.0;
      return row;
    }
    row[j] = bary_[j] / d;
    denom += row[j];
  }
  for (double& r : row) r /= denom;
  return row;
}

double CellBasis::interpolate(const double* values, double x) const noexcept {
  double num = 0.0, den = 0.0;
  for (int j = 0; j < kNodes; ++j) {
    const double d = x - nodes_[j];
    if (d == 0.0) return values[j];
    const double w = bary_[j] / d;
    num += w * values[j];
    den += w;
  }
  return num / den;
}

double CellBasis::partial_integral(const double* values, double x) const noexcept {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) {
    double s = 0.0;
    for (int j = 0; j < kNodes; ++j) s += integral_weights_[j] * values[j];
    return s;
  }
  const double half = 0.5 * (x + 1.0);
  double s = 0.0;
  for (int g = 0; g < kGauss; ++g) {
    const double u = -1.0 + half * (gauss_nodes_[g] + 1.0);
    s += gauss_weights_[g] * interpolate(values, u);
  }
  return half * s;
}

}  // namespace edtlab
