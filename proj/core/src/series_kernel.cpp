#include "edtlab/series_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "edtlab/errors.hpp"
#include "partial_fraction_oracles.hpp"

namespace edtlab {

namespace {

constexpr double kLogSwitch = 1e12;

// Term k+1 / term k of a terminating series is
//   prod(num_i + k) * z / (prod(den_i + k) * (k + 1)).
// The two series share this driver; num holds the real numerator parameters
// other than the terminating integer.
struct SeriesSpec {
  int terminating;  // a <= 0
  double num_extra;
  bool has_num_extra;
  double den1;
  double den2;
  bool has_den2;
  double z;
};

void check_denominators(const SeriesSpec& s) {
  const int n = -s.terminating;
  for (int k = 0; k < n; ++k) {
    const bool bad1 = (s.den1 + k) == 0.0;
    const bool bad2 = s.has_den2 && (s.den2 + k) == 0.0;
    if (bad1 || bad2) {
      throw EdtError(ErrorCode::kSingularParameter,
                     "denominator Pochhammer symbol vanishes at k=" + std::to_string(k));
    }
  }
}

double ratio(const SeriesSpec& s, int k) {
  double r = (s.terminating + k) * s.z / ((s.den1 + k) * (k + 1.0));
  if (s.has_num_extra) r *= (s.num_extra + k);
  if (s.has_den2) r /= (s.den2 + k);
  return r;
}

SignedLog sum_log(const SeriesSpec& s) {
  const int n = -s.terminating;
  std::vector<double> logs;
  std::vector<int> signs;
  logs.reserve(n + 1);
  signs.reserve(n + 1);
  double lt = 0.0;
  int sg = 1;
  for (int k = 0; k <= n; ++k) {
    logs.push_back(lt);
    signs.push_back(sg);
    if (k == n) break;
    const double r = ratio(s, k);
    if (r == 0.0) break;
    lt += std::log(std::fabs(r));
    if (r < 0.0) sg = -sg;
  }
  const double m = *std::max_element(logs.begin(), logs.end());
  // Pairwise-free Neumaier summation of the rescaled terms.
  double sum = 0.0, comp = 0.0;
  for (std::size_t k = 0; k < logs.size(); ++k) {
    const double t = signs[k] * std::exp(logs[k] - m);
    const double y = sum + t;
    if (std::fabs(sum) >= std::fabs(t)) {
      comp += (sum - y) + t;
    } else {
      comp += (t - y) + sum;
    }
    sum = y;
  }
  sum += comp;
  if (sum == 0.0) return {};
  return {m + std::log(std::fabs(sum)), sum > 0.0 ? 1 : -1};
}

SignedLog evaluate_log(const SeriesSpec& s) {
  if (s.terminating > 0) {
    throw EdtError(ErrorCode::kInvalidArgument, "terminating parameter must be <= 0");
  }
  check_denominators(s);
  return sum_log(s);
}

double evaluate(const SeriesSpec& s) {
  if (s.terminating > 0) {
    throw EdtError(ErrorCode::kInvalidArgument, "terminating parameter must be <= 0");
  }
  check_denominators(s);
  const int n = -s.terminating;
  double term = 1.0, sum = 0.0, comp = 0.0;
  for (int k = 0; k <= n; ++k) {
    if (std::fabs(term) > kLogSwitch) return sum_log(s).value();
    const double y = sum + term;
    if (std::fabs(sum) >= std::fabs(term)) {
      comp += (sum - y) + term;
    } else {
      comp += (term - y) + sum;
    }
    sum = y;
    if (k < n) term *= ratio(s, k);
  }
  return sum + comp;
}

}  // namespace

double SignedLog::value() const noexcept {
  if (sign == 0) return 0.0;
  return sign * std::exp(log_abs);
}

double hyp1f1_terminating(int a, double b, double z) {
  return evaluate({a, 0.0, false, b, 0.0, false, z});
}

SignedLog hyp1f1_terminating_log(int a, double b, double z) {
  return evaluate_log({a, 0.0, false, b, 0.0, false, z});
}

double hyp2f2_terminating(double a1, int a2, double b1, double b2, double z) {
  return evaluate({a2, a1, true, b1, b2, true, z});
}

SignedLog hyp2f2_terminating_log(double a1, int a2, double b1, double b2, double z) {
  return evaluate_log({a2, a1, true, b1, b2, true, z});
}

double log_binomial(long long n, long long k) {
  if (n < 0 || k < 0 || k > n) {
    throw EdtError(ErrorCode::kOutOfRange, "log_binomial needs 0 <= k <= n");
  }
  if (k == 0 || k == n) return 0.0;
  const double dn = static_cast<double>(n), dk = static_cast<double>(k);
  return std::lgamma(dn + 1.0) - std::lgamma(dk + 1.0) - std::lgamma(dn - dk + 1.0);
}

PartialFractionExpansion partial_fraction_expand(int n, double a) {
  if (n < 0) throw EdtError(ErrorCode::kOutOfRange, "expansion order must be >= 0");
  if (a == 0.0 || !std::isfinite(a)) {
    throw EdtError(ErrorCode::kZeroPoleOffset, "pole offset must be nonzero and finite");
  }
  PartialFractionExpansion pf;
  pf.order = n;
  pf.pole_offset = a;
  pf.coeffs_at_zero.resize(n);
  pf.coeffs_at_a.resize(n);
  const double log_a = std::log(std::fabs(a));
  for (int j = 0; j < n; ++j) {
    const int power = 2 * n - j - 1;
    const double mag = std::exp(log_binomial(2 * n - j - 2, n - 1) - power * log_a);
    // Sign of a^{-power} folds into the magnitude for negative a.
    const double a_sign = (a < 0.0 && power % 2 != 0) ? -1.0 : 1.0;
    const double base = ((n % 2 == 0) ? 1.0 : -1.0) * a_sign * mag;
    pf.coeffs_at_zero[j] = base;
    pf.coeffs_at_a[j] = ((j + 1) % 2 == 0 ? 1.0 : -1.0) * base;
  }
  return pf;
}

double PartialFractionExpansion::evaluate(double x) const {
  if (coeffs_at_zero.empty() && coeffs_at_a.empty()) return 1.0;
  const double inv_x = 1.0 / x, inv_y = 1.0 / (x - pole_offset);
  double sum = 0.0;
  double px = inv_x;
  for (double c : coeffs_at_zero) {
    sum += c * px;
    px *= inv_x;
  }
  double py = inv_y;
  for (double c : coeffs_at_a) {
    sum += c * py;
    py *= inv_y;
  }
  return sum;
}

namespace {

void check_offset(int k, double a) {
  if (k < 1) throw EdtError(ErrorCode::kOutOfRange, "pole order must be >= 1");
  if (a == 0.0 || !std::isfinite(a)) {
    throw EdtError(ErrorCode::kZeroPoleOffset, "pole offset must be nonzero and finite");
  }
}

}  // namespace

namespace detail {

PartialFractionExpansion partial_fraction_power_at_zero(int k, double a) {
  check_offset(k, a);
  PartialFractionExpansion pf;
  pf.order = k;
  pf.pole_offset = a;
  pf.coeffs_at_zero.resize(k);
  for (int i = 1; i <= k; ++i) pf.coeffs_at_zero[i - 1] = -std::pow(a, -(k + 1 - i));
  pf.coeffs_at_a = {std::pow(a, -k)};
  return pf;
}

PartialFractionExpansion partial_fraction_power_at_a(int k, double a) {
  check_offset(k, a);
  PartialFractionExpansion pf;
  pf.order = k;
  pf.pole_offset = a;
  pf.coeffs_at_zero = {((k % 2 == 0) ? 1.0 : -1.0) * std::pow(a, -k)};
  pf.coeffs_at_a.resize(k);
  for (int i = 1; i <= k; ++i) {
    pf.coeffs_at_a[i - 1] = (((k - i) % 2 == 0) ? 1.0 : -1.0) * std::pow(a, -(k + 1 - i));
  }
  return pf;
}

}  // namespace detail

}  // namespace edtlab
