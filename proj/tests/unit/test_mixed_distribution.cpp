#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "edtlab/chebyshev.hpp"
#include "edtlab/errors.hpp"
#include "edtlab/mixed_distribution.hpp"

namespace {

using namespace edtlab;

constexpr int kN = CellBasis::kNodes;

// Density e^{-t} sampled on uniform cells over [0, horizon].
PiecewiseDensity exponential_density(double horizon, int cells) {
  const CellBasis& basis = CellBasis::get();
  std::vector<double> edges, values;
  for (int c = 0; c <= cells; ++c) edges.push_back(horizon * c / cells);
  for (int c = 0; c < cells; ++c) {
    for (int j = 0; j < kN; ++j) {
      const double t = edges[c] + 0.5 * (edges[c + 1] - edges[c]) * (basis.nodes()[j] + 1.0);
      values.push_back(std::exp(-t));
    }
  }
  return PiecewiseDensity(edges, values, {0});
}

TailCertificate exponential_tail(double horizon) {
  return {horizon, 1.0, [](double s) { return -std::log1p(-s); }};
}

TEST(CellBasis, ReproducesPolynomials) {
  const CellBasis& b = CellBasis::get();
  std::array<double, kN> v{};
  for (int j = 0; j < kN; ++j) {
    const double x = b.nodes()[j];
    v[j] = std::pow(x, 11) - 3 * x * x + 1;
  }
  for (double x : {-0.9, -0.1, 0.33, 1.0}) {
    EXPECT_NEAR(b.interpolate(v.data(), x), std::pow(x, 11) - 3 * x * x + 1, 1e-13);
  }
  // Integral from -1 to x of x^11 - 3x^2 + 1.
  const double x = 0.4;
  const double exact = (std::pow(x, 12) - 1) / 12 - (x * x * x + 1) + (x + 1);
  EXPECT_NEAR(b.partial_integral(v.data(), x), exact, 1e-13);
  double total = 0.0;
  for (int j = 0; j < kN; ++j) total += b.integral_weights()[j] * v[j];
  EXPECT_NEAR(total, -2.0 + 2.0, 1e-13);
}

TEST(CellBasis, LagrangeRowSumsToOne) {
  const auto row = CellBasis::get().lagrange_row(0.123);
  double s = 0.0;
  for (double r : row) s += r;
  EXPECT_NEAR(s, 1.0, 1e-14);
}

TEST(MixedDistribution, ExponentialDensity) {
  const double h = 40.0;
  const MixedDistribution d({}, exponential_density(h, 400), exponential_tail(h));
  EXPECT_NEAR(d.total_mass(), 1 - std::exp(-h), 1e-12);
  EXPECT_NEAR(d.cdf(1.3), 1 - std::exp(-1.3), 1e-12);
  EXPECT_NEAR(d.pdf(2.0), std::exp(-2.0), 1e-12);
  EXPECT_NEAR(d.moment(1).value, 1.0, 1e-12);
  EXPECT_NEAR(d.moment(2).value, 2.0, 1e-10);
  EXPECT_NEAR(d.laplace(-0.5), 1 / 1.5, 1e-12);
  EXPECT_NEAR(d.quantile(0.5), std::log(2.0), 1e-10);
  EXPECT_EQ(d.cdf(-1.0), 0.0);
}

TEST(MixedDistribution, ChernoffBoundOfExponential) {
  const TailCertificate tail = exponential_tail(5.0);
  for (double x : {2.0, 5.0, 12.0}) {
    EXPECT_NEAR(tail.bound(x), x * std::exp(1 - x), 1e-9 * x * std::exp(1 - x));
  }
  EXPECT_EQ(tail.bound(0.5), 1.0);
  const MixedDistribution d({}, exponential_density(5.0, 50), tail);
  EXPECT_NEAR(d.tail_mass_bound(), 5 * std::exp(-4.0), 1e-9);
  EXPECT_GE(d.tail_mass_bound(), std::exp(-5.0));
  // E[X; X > 5] = 6 e^{-5} must sit under its bound.
  EXPECT_GE(d.moment(1).uncertainty, 6 * std::exp(-5.0));
}

TEST(MixedDistribution, AtomsJumpAndMerge) {
  const MixedDistribution d({{1.0, 0.25}, {3.0, 0.5}, {1.0 + 1e-14, 0.25}}, PiecewiseDensity{},
                            TailCertificate{});
  ASSERT_EQ(d.atoms().size(), 2u);
  EXPECT_DOUBLE_EQ(d.atom_at(1.0), 0.5);
  EXPECT_DOUBLE_EQ(d.cdf_left(3.0), 0.5);
  EXPECT_DOUBLE_EQ(d.cdf(3.0), 1.0);
  EXPECT_DOUBLE_EQ(d.cdf(3.0) - d.cdf_left(3.0), d.atom_at(3.0));
  EXPECT_DOUBLE_EQ(d.moment(1).value, 2.0);
  EXPECT_EQ(d.quantile(0.5), 1.0);
  EXPECT_EQ(d.quantile(0.75), 3.0);
  const MixedDistribution s = d.shifted(2.0);
  EXPECT_DOUBLE_EQ(s.atom_at(3.0), 0.5);
  EXPECT_DOUBLE_EQ(s.moment(1).value, 4.0);
}

TEST(MixedDistribution, RejectsNegativeAtoms) {
  EXPECT_THROW(MixedDistribution({{1.0, -0.1}}, PiecewiseDensity{}, TailCertificate{}), EdtError);
}

TEST(MixedDistribution, Mixture) {
  const PiecewiseDensity e = exponential_density(30.0, 300);
  const MixedDistribution a({{0.0, 0.5}}, e.scaled(0.5), exponential_tail(30.0));
  const MixedDistribution b({}, e, exponential_tail(30.0));
  const MixedDistribution m = MixedDistribution::mixture(a, 0.25, b, 0.75);
  EXPECT_NEAR(m.atom_at(0.0), 0.125, 1e-15);
  for (double t : {0.5, 2.0, 7.0}) {
    EXPECT_NEAR(m.cdf(t), 0.25 * a.cdf(t) + 0.75 * b.cdf(t), 1e-14);
  }
}

}  // namespace
