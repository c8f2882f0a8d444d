#pragma once

#include <vector>

namespace edtlab {

/// A real number stored as sign * exp(log_abs). Zero has sign 0.
struct SignedLog {
  double log_abs = -1.0 / 0.0;
  int sign = 0;

  double value() const noexcept;
};

/// Terminating 1F1(a; b; z) for integer a <= 0.
///
/// Summed with the term-ratio recurrence. When any term exceeds 1e12 in
/// magnitude the sum is redone in the log/sign domain. Throws
/// kSingularParameter if (b)_k vanishes for some k <= |a|.
double hyp1f1_terminating(int a, double b, double z);
SignedLog hyp1f1_terminating_log(int a, double b, double z);

/// Terminating 2F2(a1, a2; b1, b2; z) for integer a2 <= 0.
double hyp2f2_terminating(double a1, int a2, double b1, double b2, double z);
SignedLog hyp2f2_terminating_log(double a1, int a2, double b1, double b2, double z);

/// sum_j coeffs_at_zero[j]/x^{j+1} + sum_j coeffs_at_a[j]/(x-a)^{j+1}, or 1
/// when both lists are empty.
struct PartialFractionExpansion {
  int order = 0;
  double pole_offset = 0.0;
  std::vector<double> coeffs_at_zero;
  std::vector<double> coeffs_at_a;

  double evaluate(double x) const;
};

/// Expansion of 1/[x(x-a)]^n. Throws kZeroPoleOffset for a == 0 and
/// kOutOfRange for n < 0.
PartialFractionExpansion partial_fraction_expand(int n, double a);

/// ln C(n, k) through lgamma. Throws kOutOfRange unless 0 <= k <= n.
double log_binomial(long long n, long long k);

}  // namespace edtlab
