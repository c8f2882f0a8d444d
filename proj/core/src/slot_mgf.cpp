#include "edtlab/slot_mgf.hpp"

#include <cmath>
#include <limits>
#include <variant>

#include <boost/math/tools/roots.hpp>

#include "edtlab/errors.hpp"

namespace edtlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSeriesTail = 1e-12;
constexpr long kMaxTerms = 50'000'000;

// (1 - e^{-x}) / x, stable near 0.
double one_minus_exp_over(double x) {
  if (std::fabs(x) < 1e-8) return 1.0 - 0.5 * x;
  return -std::expm1(-x) / x;
}

// Sum of first * ratio^j over j >= 0, stopping at relative tail kSeriesTail.
double geometric_series(double first, double ratio, const char* what) {
  if (!(ratio < 1.0)) {
    throw EdtError(ErrorCode::kDivergentSeries, std::string(what) + " term ratio >= 1");
  }
  if (first == 0.0) return 0.0;
  double sum = 0.0, comp = 0.0, term = first;
  for (long j = 0; j < kMaxTerms; ++j) {
    const double y = sum + term;
    comp += std::fabs(sum) >= std::fabs(term) ? (sum - y) + term : (term - y) + sum;
    sum = y;
    term *= ratio;
    // Remaining tail is term / (1 - ratio) for a positive ratio.
    const double tail = std::fabs(term) / (1.0 - std::fabs(ratio));
    if (tail <= kSeriesTail * std::fabs(sum + comp)) break;
  }
  return sum + comp;
}

}  // namespace

WaitingMgf::WaitingMgf(const TrafficModel& model, const PacketSpec& packet,
                       const SensingMode& mode, PuState state)
    : lambda_(model.lambda()),
      mu_(model.mu()),
      t_tr_(packet.t_tr()),
      p_(slot_success_probability(model, packet)),
      ts_(sensing_interval(mode)),
      beta_(0.0),
      pe_(missed_detection(mode)),
      continuous_(std::holds_alternative<ContinuousSensing>(mode)),
      imperfect_(std::holds_alternative<PeriodicImperfectSensing>(mode)),
      state_(state),
      s_max_(0.0) {
  validate(mode);
  double pole = 0.0;
  if (continuous_) {
    pole = 1.0 / lambda_;
  } else {
    beta_ = busy_persistence_beta(model, ts_);
    pole = -std::log(beta_) / ts_;
    if (imperfect_ && pe_ > 0.0) pole = std::min(pole, -std::log(pe_) / ts_);
  }
  // R(s) = failed_slot(s) * wait_slot(s) increases from R(0) = 1 - p to
  // infinity at the pole; the MGF diverges where R reaches 1.
  auto excess = [this](double s) { return failed_slot(s) * wait_slot(s) - 1.0; };
  double lo = 0.0, hi = pole;
  // Pull hi inside the pole until R is finite.
  for (int i = 0; i < 200 && !std::isfinite(excess(hi)); ++i) hi = lo + 0.999999 * (hi - lo);
  if (excess(hi) <= 0.0) {
    s_max_ = hi;
  } else {
    boost::uintmax_t iters = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(50);
    const auto r = boost::math::tools::toms748_solve(excess, lo, hi, excess(lo), excess(hi), tol, iters);
    s_max_ = r.first;
  }
}

double WaitingMgf::failed_slot(double s) const noexcept {
  const double x = t_tr_ * (1.0 / mu_ - s);
  return (t_tr_ / mu_) * one_minus_exp_over(x);
}

double WaitingMgf::wait_slot(double s) const noexcept {
  double m = 0.0;
  if (continuous_) {
    const double d = 1.0 - lambda_ * s;
    if (d <= 0.0) return kInf;
    m = 1.0 / d;
  } else {
    const double e = std::exp(s * ts_);
    const double d = 1.0 - beta_ * e;
    if (d <= 0.0) return kInf;
    m = (1.0 - beta_) * e / d;
  }
  if (imperfect_) {
    const double d = 1.0 - pe_ * std::exp(s * ts_);
    if (d <= 0.0) return kInf;
    m *= (1.0 - pe_) / d;
  }
  return m;
}

double WaitingMgf::first_slot(double s) const noexcept {
  if (state_ == PuState::kOn) return wait_slot(s);
  if (imperfect_) {
    const double d = 1.0 - pe_ * std::exp(s * ts_);
    if (d <= 0.0) return kInf;
    return (1.0 - pe_) / d;
  }
  return 1.0;
}

double WaitingMgf::log_value(double s) const noexcept {
  if (s >= s_max_) return kInf;
  const double r = failed_slot(s) * wait_slot(s);
  if (!(r < 1.0)) return kInf;
  return std::log(first_slot(s)) + std::log(p_) - std::log1p(-r);
}

double WaitingMgf::value(double s) const noexcept { return std::exp(log_value(s)); }

TailCertificate WaitingMgf::certificate(double horizon) const {
  TailCertificate c;
  c.horizon = horizon;
  c.s_max = s_max_;
  const WaitingMgf self = *this;
  c.log_mgf = [self](double s) { return self.log_value(s); };
  return c;
}

double mgf_waiting_series(const TrafficModel& model, const PacketSpec& packet,
                          const SensingMode& mode, PuState state, double s) {
  validate(mode);
  const double mu = model.mu(), t = packet.t_tr();
  const double p = slot_success_probability(model, packet);
  const double q = -std::expm1(-t / mu);

  // Truncated-exponential slot transform, (1 - e^{T(s - 1/mu)}) / ((1 - mu s)(1 - p)).
  double waste = 0.0;
  {
    const double x = t * (1.0 / mu - s);
    waste = (t / mu) * one_minus_exp_over(x) / q;
  }

  double wait = 0.0;
  double mis = 1.0;
  if (std::holds_alternative<ContinuousSensing>(mode)) {
    if (!(model.lambda() * s < 1.0)) {
      throw EdtError(ErrorCode::kDivergentSeries, "continuous waiting transform needs s < 1/lambda");
    }
    wait = 1.0 / (1.0 - model.lambda() * s);
  } else {
    const double ts = sensing_interval(mode);
    const double beta = busy_persistence_beta(model, ts);
    const double e = std::exp(s * ts);
    wait = geometric_series((1.0 - beta) * e, beta * e, "periodic waiting");
    if (std::holds_alternative<PeriodicImperfectSensing>(mode)) {
      const double pe = missed_detection(mode);
      mis = geometric_series(1.0 - pe, pe * e, "missed detection");
    }
  }

  // k-th slot succeeds: P_k * wait^{k-1 or k} * waste^{k-1} * mis^k.
  const double first = state == PuState::kOn ? wait : 1.0;
  const double ratio = q * waste * wait * mis;
  return geometric_series(p * first * mis, ratio, "slot");
}

}  // namespace edtlab
