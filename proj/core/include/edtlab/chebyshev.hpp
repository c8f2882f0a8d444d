#pragma once

#include <array>

namespace edtlab {

/// Polynomial basis used inside every density cell: Chebyshev-Lobatto nodes
/// on [-1, 1] in increasing order, barycentric interpolation, and a
/// Gauss-Legendre rule that integrates the interpolant exactly.
class CellBasis {
 public:
  static constexpr int kNodes = 12;
  static constexpr int kGauss = 16;

  using Row = std::array<double, kNodes>;

  static const CellBasis& get();

  const std::array<double, kNodes>& nodes() const noexcept { return nodes_; }
  const std::array<double, kGauss>& gauss_nodes() const noexcept { return gauss_nodes_; }
  const std::array<double, kGauss>& gauss_weights() const noexcept { return gauss_weights_; }

  /// Integral over [-1, 1] of each Lagrange basis polynomial.
  const Row& integral_weights() const noexcept { return integral_weights_; }

  /// Lagrange basis values at x in [-1, 1].
  Row lagrange_row(double x) const noexcept;

  /// Value of the interpolant through `values` at x in [-1, 1].
  double interpolate(const double* values, double x) const noexcept;

  /// Integral of the interpolant from -1 to x.
  double partial_integral(const double* values, double x) const noexcept;

 private:
  CellBasis();

  std::array<double, kNodes> nodes_{};
  std::array<double, kNodes> bary_{};
  std::array<double, kGauss> gauss_nodes_{};
  std::array<double, kGauss> gauss_weights_{};
  Row integral_weights_{};
};

}  // namespace edtlab
