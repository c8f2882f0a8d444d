#include "edtlab/queueing.hpp"

#include <cmath>
#include <limits>
#include <variant>

#include "edtlab/errors.hpp"

namespace edtlab {

namespace {

// p/(1-p) with p = e^{-x}, i.e. 1/(e^x - 1).
double odds(double x) { return 1.0 / std::expm1(x); }

// (1-p)/p with p = e^{-x}.
double inverse_odds(double x) { return std::expm1(x); }

Moments2 geometric_lattice(double ts, double beta) {
  // n >= 1 with P(n) = (1-beta) beta^{n-1}, scaled by ts.
  const double q = 1.0 - beta;
  return {ts / q, ts * ts * (1.0 + beta) / (q * q)};
}

Moments2 missed_detection_delay(double ts, double pe) {
  // m >= 0 with P(m) = (1-pe) pe^m, scaled by ts.
  const double q = 1.0 - pe;
  return {ts * pe / q, ts * ts * pe * (1.0 + pe) / (q * q)};
}

Moments2 add_independent(Moments2 a, Moments2 b) {
  return {a.m1 + b.m1, a.m2 + 2.0 * a.m1 * b.m1 + b.m2};
}

void check_ts(double ts) {
  if (!(ts > 0.0) || !std::isfinite(ts)) {
    throw EdtError(ErrorCode::kInvalidArgument, "sensing interval must be > 0");
  }
}

}  // namespace

Moments2 waste_moments(const TrafficModel& model, const PacketSpec& packet) {
  const double mu = model.mu(), t = packet.t_tr(), x = t / mu;
  // mu * (1 - x/(e^x - 1)) and its second-moment analogue, with series
  // forms where the closed forms cancel.
  double m1, m2;
  if (x < 1e-6) {
    m1 = t * (0.5 - x / 12.0);
    m2 = t * t * (1.0 / 3.0 - x / 12.0);
  } else {
    const double o = odds(x);
    m1 = mu - t * o;
    m2 = 2.0 * mu * mu + o * (-t * t - 2.0 * mu * t);
  }
  return {m1, m2};
}

SlotMoments slot_moments(const TrafficModel& model, const PacketSpec& packet, double ts) {
  check_ts(ts);
  const Moments2 wait = geometric_lattice(ts, busy_persistence_beta(model, ts));
  const Moments2 waste = waste_moments(model, packet);
  return {wait.m1, wait.m2, waste.m1, waste.m2};
}

Moments2 wait_moments(const TrafficModel& model, const SensingMode& mode) {
  validate(mode);
  if (std::holds_alternative<ContinuousSensing>(mode)) {
    return {model.lambda(), 2.0 * model.lambda() * model.lambda()};
  }
  const double ts = sensing_interval(mode);
  const Moments2 lattice = geometric_lattice(ts, busy_persistence_beta(model, ts));
  if (std::holds_alternative<PeriodicPerfectSensing>(mode)) return lattice;
  return add_independent(lattice, missed_detection_delay(ts, missed_detection(mode)));
}

Moments2 first_slot_moments(const TrafficModel& model, const SensingMode& mode, PuState state) {
  if (state == PuState::kOn) return wait_moments(model, mode);
  if (const auto* im = std::get_if<PeriodicImperfectSensing>(&mode)) {
    validate(mode);
    return missed_detection_delay(im->ts, im->pe);
  }
  return {0.0, 0.0};
}

ServiceMoments service_moments(const TrafficModel& model, const PacketSpec& packet, double ts) {
  check_ts(ts);
  const double beta = busy_persistence_beta(model, ts);
  const double mu = model.mu(), t = packet.t_tr(), x = t / mu;
  const double r = inverse_odds(x);  // (1-p)/p
  const double inv_p = std::exp(x);  // 1/p
  const double w = ts / (1.0 - beta);
  const double w2 = ts * ts * (1.0 + beta) / ((1.0 - beta) * (1.0 - beta));

  ServiceMoments sm{};
  sm.m1_off = r * (mu + w);
  sm.m1_on = sm.m1_off + w;
  sm.m2_off = inv_p * (-2.0 * t * w - 2.0 * mu * t) + r * inv_p * (2.0 * mu * w + 2.0 * mu * mu) +
              r * w2 + r * r * (2.0 * w * w + 2.0 * mu * w);
  sm.m2_on = inv_p * (-2.0 * t * w - 2.0 * mu * t + w2) +
             r * inv_p * (2.0 * mu * w + 2.0 * mu * mu + 2.0 * w * w + 2.0 * mu * w);
  return sm;
}

ServiceMoments service_moments_general(const TrafficModel& model, const PacketSpec& packet,
                                       const SensingMode& mode) {
  const double t = packet.t_tr(), x = t / model.mu();
  const double p = std::exp(-x);
  const double q = -std::expm1(-x);
  const Moments2 waste = waste_moments(model, packet);
  const Moments2 wait = wait_moments(model, mode);
  const Moments2 z = add_independent(waste, wait);
  const double var_z = z.m2 - z.m1 * z.m1;
  // F failed slots, P(F = f) = p q^f.
  const double ef = q / p;
  const double ef2 = q * (1.0 + q) / (p * p);
  const Moments2 y{ef * z.m1, ef * var_z + ef2 * z.m1 * z.m1};

  auto service = [&](PuState state) {
    const Moments2 a0 = first_slot_moments(model, mode, state);
    const Moments2 tw = add_independent(a0, y);
    return Moments2{tw.m1 + t, tw.m2 + 2.0 * t * tw.m1 + t * t};
  };
  const Moments2 off = service(PuState::kOff);
  const Moments2 on = service(PuState::kOn);
  return {off.m1, off.m2, on.m1, on.m2};
}

double p_on_type2(const TrafficModel& model, double psi) {
  if (!(psi > 0.0)) throw EdtError(ErrorCode::kNonPositiveInput, "psi must be > 0");
  const double l = model.lambda(), m = model.mu();
  if (std::isinf(psi)) return l / (l + m);
  return l * psi / (l * psi + l * m + m * psi);
}

TypeMoments type_moments(const ServiceMoments& sm, double p_on2) {
  if (!(p_on2 >= 0.0 && p_on2 <= 1.0)) {
    throw EdtError(ErrorCode::kOutOfRange, "P_on,2 must lie in [0, 1]");
  }
  return {sm.m1_off, sm.m2_off, p_on2 * sm.m1_on + (1.0 - p_on2) * sm.m1_off,
          p_on2 * sm.m2_on + (1.0 - p_on2) * sm.m2_off};
}

DelayResult mean_delay(const QueueConfig& config) {
  const double psi = config.psi;
  const ServiceMoments sm =
      std::holds_alternative<PeriodicPerfectSensing>(config.mode)
          ? service_moments(config.model, config.packet, sensing_interval(config.mode))
          : service_moments_general(config.model, config.packet, config.mode);
  const TypeMoments tm = type_moments(sm, p_on_type2(config.model, psi));

  DelayResult r{};
  r.psi = psi;
  r.e1_t = tm.e1_t;
  r.e2_t = tm.e2_t;
  r.e1_t2 = tm.e1_t2;
  r.e2_t2 = tm.e2_t2;
  r.stable = psi > tm.e1_t;
  if (!r.stable) {
    const double inf = std::numeric_limits<double>::infinity();
    r.type2_fraction = 0.0;
    r.et2 = tm.e1_t2;
    r.mean_delay = inf;
    r.mean_queue_length = inf;
    return r;
  }
  const double denom = psi + tm.e2_t - tm.e1_t;
  r.type2_fraction = (psi - tm.e1_t) / denom;
  r.et2 = r.type2_fraction * tm.e2_t2 + (1.0 - r.type2_fraction) * tm.e1_t2;
  r.mean_delay = psi * tm.e2_t / denom + r.et2 / (2.0 * (psi - tm.e1_t));
  r.mean_queue_length = r.et2 / (2.0 * psi * (psi - tm.e1_t));
  return r;
}

}  // namespace edtlab
