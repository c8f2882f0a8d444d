#include <gtest/gtest.h>

#include <cmath>

#include "edtlab/errors.hpp"
#include "edtlab/series_kernel.hpp"
#include "partial_fraction_oracles.hpp"

namespace {

using namespace edtlab;

template <class F>
void expect_code(F&& f, ErrorCode code) {
  try {
    f();
    ADD_FAILURE() << "no exception";
  } catch (const EdtError& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TEST(Hypergeometric, TrivialAndSmallCases) {
  EXPECT_EQ(hyp1f1_terminating(0, 2.5, 7.3), 1.0);
  EXPECT_DOUBLE_EQ(hyp1f1_terminating(-1, -2, 3), 2.5);
  // Exact rational value 156301/86016.
  EXPECT_NEAR(hyp1f1_terminating(-4, -8, 1.25), 156301.0 / 86016.0, 1e-15);
}

TEST(Hypergeometric, TwoFTwo) {
  for (double z : {-3.0, 0.0, 0.7, 5.0}) {
    EXPECT_NEAR(hyp2f2_terminating(2, -1, 1, 1, z), 1 - 2 * z, 1e-14);
  }
  // Exact rational value 343/1875.
  EXPECT_NEAR(hyp2f2_terminating(4, -3, 3, 3, 0.8), 343.0 / 1875.0, 1e-15);
}

TEST(Hypergeometric, SingularDenominator) {
  expect_code([] { hyp1f1_terminating(-3, -2, 1.0); }, ErrorCode::kSingularParameter);
  expect_code([] { hyp2f2_terminating(1.0, -2, 2.0, -1.0, 1.0); },
              ErrorCode::kSingularParameter);
  // A vanishing (b)_k beyond the last term is harmless.
  EXPECT_NO_THROW(hyp1f1_terminating(-2, -2, 1.0));
}

TEST(Hypergeometric, LogDomain) {
  // mpmath: ln 1F1(-200; 1; -50) = 173.72841593867985291.
  const SignedLog v = hyp1f1_terminating_log(-200, 1, -50);
  EXPECT_EQ(v.sign, 1);
  EXPECT_NEAR(v.log_abs, 173.72841593867985291, 1e-11 * 173.7);
  EXPECT_NEAR(std::log(hyp1f1_terminating(-200, 1, -50)), 173.72841593867985291, 1e-10);
  // mpmath: 2F2(1.5, -150; 2.5, 0.5; -40) = 2.9643802084029572832e57.
  const SignedLog w = hyp2f2_terminating_log(1.5, -150, 2.5, 0.5, -40);
  EXPECT_EQ(w.sign, 1);
  EXPECT_NEAR(w.log_abs, 132.33401827530744797, 1e-11 * 132.3);
}

TEST(Hypergeometric, ContiguousRecurrenceInM) {
  // (b + m) F(-m-1) + (z - b - 2m) F(-m) + m F(-m+1) = 0.
  const double b = 2.5;
  for (double z : {0.3, 1.7, 4.0}) {
    for (int m = 2; m <= 10; ++m) {
      const double fm1 = hyp1f1_terminating(-m - 1, b, z);
      const double f0 = hyp1f1_terminating(-m, b, z);
      const double fp1 = hyp1f1_terminating(-m + 1, b, z);
      const double scale = std::fabs((b + m) * fm1) + std::fabs((z - b - 2 * m) * f0) +
                           std::fabs(m * fp1);
      EXPECT_NEAR((b + m) * fm1 + (z - b - 2 * m) * f0 + m * fp1, 0.0, 1e-13 * scale)
          << "m=" << m << " z=" << z;
    }
  }
}

TEST(PartialFractions, OrderOne) {
  const PartialFractionExpansion pf = partial_fraction_expand(1, 2.0);
  ASSERT_EQ(pf.coeffs_at_zero.size(), 1u);
  ASSERT_EQ(pf.coeffs_at_a.size(), 1u);
  EXPECT_DOUBLE_EQ(pf.coeffs_at_zero[0], -0.5);
  EXPECT_DOUBLE_EQ(pf.coeffs_at_a[0], 0.5);
  EXPECT_NEAR(pf.evaluate(0.7), 1.0 / (0.7 * (0.7 - 2.0)), 1e-14);
}

TEST(PartialFractions, OrderFive) {
  const double x = 0.4, a = 1.7;
  const double direct = std::pow(1.0 / (x * (x - a)), 5);
  EXPECT_NEAR(partial_fraction_expand(5, a).evaluate(x), direct, 1e-10 * std::fabs(direct));
}

TEST(PartialFractions, OrderZeroIsOne) {
  EXPECT_EQ(partial_fraction_expand(0, 3.0).evaluate(0.25), 1.0);
}

TEST(PartialFractions, Errors) {
  expect_code([] { partial_fraction_expand(2, 0.0); }, ErrorCode::kZeroPoleOffset);
  expect_code([] { partial_fraction_expand(-1, 1.0); }, ErrorCode::kOutOfRange);
  expect_code([] { detail::partial_fraction_power_at_zero(0, 1.0); }, ErrorCode::kOutOfRange);
  expect_code([] { detail::partial_fraction_power_at_a(2, 0.0); }, ErrorCode::kZeroPoleOffset);
}

TEST(PartialFractions, SinglePolePowers) {
  for (double a : {-1.3, 0.8, 2.0}) {
    for (int k = 1; k <= 6; ++k) {
      const double x = 0.37 * a;
      const double at_zero = 1.0 / (std::pow(x, k) * (x - a));
      const double at_a = 1.0 / (x * std::pow(x - a, k));
      EXPECT_NEAR(detail::partial_fraction_power_at_zero(k, a).evaluate(x), at_zero,
                  1e-12 * std::fabs(at_zero));
      EXPECT_NEAR(detail::partial_fraction_power_at_a(k, a).evaluate(x), at_a,
                  1e-12 * std::fabs(at_a));
    }
  }
}

TEST(LogBinomial, Values) {
  EXPECT_EQ(log_binomial(7, 0), 0.0);
  EXPECT_NEAR(log_binomial(4, 2), std::log(6.0), 1e-15);
  // ln C(200, 71) from exact integer arithmetic.
  EXPECT_NEAR(log_binomial(200, 71), 127.26497285800791, 1e-12 * 127.3);
  expect_code([] { log_binomial(3, 4); }, ErrorCode::kOutOfRange);
  expect_code([] { log_binomial(3, -1); }, ErrorCode::kOutOfRange);
}

}  // namespace
