#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "edtlab/chebyshev.hpp"

namespace edtlab {

struct Atom {
  double location;
  double mass;
};

/// Piecewise-polynomial density on contiguous cells. Each cell carries
/// CellBasis::kNodes values at its Chebyshev-Lobatto nodes. Cells are grouped
/// into smooth pieces; the density may jump or kink only between pieces.
class PiecewiseDensity {
 public:
  static constexpr int kNodes = CellBasis::kNodes;

  PiecewiseDensity() = default;
  PiecewiseDensity(std::vector<double> edges, std::vector<double> values,
                   std::vector<std::size_t> piece_starts);

  std::size_t cell_count() const noexcept { return edges_.empty() ? 0 : edges_.size() - 1; }
  const std::vector<double>& edges() const noexcept { return edges_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<std::size_t>& piece_starts() const noexcept { return piece_starts_; }
  const double* cell_values(std::size_t c) const noexcept { return values_.data() + c * kNodes; }

  double start() const noexcept { return edges_.empty() ? 0.0 : edges_.front(); }
  double end() const noexcept { return edges_.empty() ? 0.0 : edges_.back(); }

  /// Right limit of the density at t (zero outside the cells).
  double density(double t) const noexcept;
  double density_left(double t) const noexcept;

  /// Integral of the density from start() to t.
  double integral_to(double t) const noexcept;
  double total() const noexcept { return prefix_.empty() ? 0.0 : prefix_.back(); }

  double min_node_value() const noexcept;

  /// Integral of density(t) * weight(t) by Gauss-Legendre per cell.
  double integrate(const std::function<double(double)>& weight) const;

  /// Integral of t^k density(t); exact up to rounding for k <= 4.
  double raw_moment(int k) const noexcept;

  /// Integral of e^{st} density(t).
  double laplace(double s) const noexcept;

  PiecewiseDensity shifted(double dt) const;
  PiecewiseDensity scaled(double factor) const;

  /// wa*a + wb*b for densities built on the same cells.
  static PiecewiseDensity combine(const PiecewiseDensity& a, double wa, const PiecewiseDensity& b,
                                  double wb);

  /// Cell containing t; right==true prefers the cell starting at t.
  std::size_t locate(double t, bool right) const noexcept;

 private:
  void build_prefix();

  std::vector<double> edges_;
  std::vector<double> values_;
  std::vector<std::size_t> piece_starts_;
  std::vector<double> prefix_;
};

/// Chernoff certificate for the mass beyond a truncation horizon.
struct TailCertificate {
  double horizon = 0.0;
  /// Exclusive upper end of the interval (0, s_max) where log_mgf is finite.
  double s_max = 0.0;
  std::function<double(double)> log_mgf;

  /// min_s E[e^{sX}] e^{-sx}, an upper bound on P(X > x).
  double bound(double x) const;

  /// Upper bound on E[X^k; X > horizon]. Infinite when no s >= k/horizon is
  /// available.
  double moment_tail(int k) const;
};

struct MomentEstimate {
  double value;
  /// Upper bound on the contribution of the truncated tail.
  double uncertainty;
};

/// Atoms plus a piecewise density plus a certified tail bound.
class MixedDistribution {
 public:
  static constexpr double kAtomMergeTolerance = 1e-12;

  MixedDistribution() = default;
  MixedDistribution(std::vector<Atom> atoms, PiecewiseDensity density, TailCertificate tail);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const PiecewiseDensity& density() const noexcept { return density_; }
  const TailCertificate& tail() const noexcept { return tail_; }

  double support_end() const noexcept { return tail_.horizon; }
  double tail_mass_bound() const noexcept { return tail_bound_; }

  double atom_mass() const noexcept;
  /// Atoms plus integrated density, excluding the tail bound.
  double total_mass() const noexcept { return atom_mass() + density_.total(); }

  /// Mass of the atom at t (within the merge tolerance), or 0.
  double atom_at(double t) const noexcept;

  double pdf(double t) const noexcept { return density_.density(t); }
  /// P(X <= t), right-continuous.
  double cdf(double t) const noexcept;
  /// P(X < t).
  double cdf_left(double t) const noexcept;

  /// E[e^{sX}] over the represented mass.
  double laplace(double s) const noexcept;

  MomentEstimate moment(int k) const;

  /// Smallest t with cdf(t) >= u, for u below total_mass().
  double quantile(double u) const;

  MixedDistribution shifted(double dt) const;

  static MixedDistribution mixture(const MixedDistribution& a, double wa,
                                   const MixedDistribution& b, double wb);

 private:
  std::vector<Atom> atoms_;
  std::vector<double> atom_prefix_;
  PiecewiseDensity density_;
  TailCertificate tail_;
  double tail_bound_ = 0.0;
};

}  // namespace edtlab
