#include "edtlab/closed_form.hpp"

#include <cmath>
#include <variant>

#include "edtlab/errors.hpp"
#include "edtlab/series_kernel.hpp"

namespace edtlab {

namespace {

double binom(long long n, long long k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(log_binomial(n, k));
}

double continuous_off(double lambda, double mu, double t_tr, double t) {
  const double alpha = 1.0 / lambda + 1.0 / mu;
  const double p = std::exp(-t_tr / mu);
  const double lm = lambda + mu;
  double f = p / lm * (-std::expm1(-alpha * t));
  if (t > t_tr) f -= p * p / lm * (-std::expm1(-alpha * (t - t_tr)));
  for (int i = 1; i * t_tr < t; ++i) {
    const double coef = std::exp(i * std::log(lambda * mu) - (2 * i + 1) * std::log(lm) +
                                 log_binomial(2 * i, i));
    const double x0 = t - i * t_tr;
    double bracket = (hyp1f1_terminating(-i, -2 * i, -alpha * x0) -
                      std::exp(-alpha * x0) * hyp1f1_terminating(-i, -2 * i, alpha * x0)) *
                     std::pow(p, i + 1);
    const double x1 = t - (i + 1) * t_tr;
    if (x1 > 0.0) {
      bracket -= (hyp1f1_terminating(-i, -2 * i, -alpha * x1) -
                  std::exp(-alpha * x1) * hyp1f1_terminating(-i, -2 * i, alpha * x1)) *
                 std::pow(p, i + 2);
    }
    f += coef * bracket;
  }
  return f;
}

double continuous_on(double lambda, double mu, double t_tr, double t) {
  const double alpha = 1.0 / lambda + 1.0 / mu;
  const double p = std::exp(-t_tr / mu);
  const double lm = lambda + mu;
  const double r = mu / lambda;
  double f = p / lm * (1.0 + r * std::exp(-alpha * t));
  for (int i = 1; i * t_tr < t; ++i) {
    const double x = t - i * t_tr;
    const double coef = std::exp(i * std::log(lambda * mu) - (2 * i + 1) * std::log(lm)) *
                        std::pow(p, i + 1);
    const double c2 = binom(2 * i, i), c1 = binom(2 * i - 1, i);
    const double e = std::exp(-alpha * x);
    const double a = hyp1f1_terminating(-i, -2 * i, -alpha * x);
    const double b = hyp1f1_terminating(-i, -2 * i, alpha * x);
    const double a1 = hyp1f1_terminating(1 - i, 1 - 2 * i, -alpha * x);
    const double b1 = hyp1f1_terminating(1 - i, 1 - 2 * i, alpha * x);
    f += coef * (c2 * a + c2 * r * e * b - c1 * (1.0 + r) * a1 - c1 * (1.0 + r) * e * b1);
  }
  return f;
}

double periodic_off(double mu, double t_tr, double ts, double beta, double t) {
  const double p = std::exp(-t_tr / mu);
  const double c = (1.0 - beta) / beta;
  double f = 0.0;
  for (int n = 1; n * ts < t; ++n) {
    const double x = t - n * ts;
    f += (1.0 - beta) * std::pow(beta, n - 1) / mu * std::exp(-x / mu) * p *
         hyp1f1_terminating(1 - n, 1.0, -c * x / mu);
    for (int i = 1; i <= n; ++i) {
      const double y = x - i * t_tr;
      if (y <= 0.0) break;
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      const double mag = std::exp((i + 1) * std::log(p) + log_binomial(n - 1, i - 1) -
                                  std::lgamma(i) + (i - 1) * std::log(y) - i * std::log(mu) +
                                  i * std::log(1.0 - beta) + (n - i) * std::log(beta) - y / mu);
      f += sign * mag * hyp2f2_terminating(i + 1, i - n, i, i, -c * y / mu);
    }
  }
  return f;
}

double periodic_on(double mu, double t_tr, double ts, double beta, double t) {
  const double p = std::exp(-t_tr / mu);
  const double c = (1.0 - beta) / beta;
  double f = 0.0;
  for (int n = 1; n * ts < t; ++n) {
    const double x = t - n * ts;
    if (n >= 2) {
      f += p * (n - 1) * (1.0 - beta) * (1.0 - beta) * std::pow(beta, n - 2) / mu *
           std::exp(-x / mu) * hyp1f1_terminating(2 - n, 2.0, -c * x / mu);
    }
    for (int i = 1; i <= n - 1; ++i) {
      const double y = x - i * t_tr;
      if (y <= 0.0) break;
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      const double mag = std::exp((i + 1) * std::log(p) + log_binomial(n - 1, i) +
                                  (i + 1) * std::log(1.0 - beta) + (n - i - 1) * std::log(beta) +
                                  (i - 1) * std::log(y) - y / mu - std::lgamma(i) -
                                  i * std::log(mu));
      f += sign * mag * hyp1f1_terminating(i + 1 - n, i, -c * y / mu);
    }
  }
  return f;
}

// Erlang-kernel quadruple sums; `on` selects the on-case weights.
double imperfect(double mu, double t_tr, double ts, double beta, double pe, bool on, double t) {
  const double p = std::exp(-t_tr / mu);
  double f = 0.0;
  for (int n = 1; n * ts < t; ++n) {
    const int k_hi = on ? n : n + 1;
    for (int m = 0; (n + m) * ts < t; ++m) {
      const double base = t - (n + m) * ts;
      for (int k = 2; k <= k_hi; ++k) {
        double lw = 0.0;
        if (on) {
          lw = k * std::log(1.0 - beta) + (n - k) * std::log(beta) + log_binomial(n - 1, k - 1);
        } else {
          lw = (k - 1) * std::log(1.0 - beta) + (n - k + 1) * std::log(beta) +
               log_binomial(n - 1, k - 2);
        }
        lw += k * std::log1p(-pe) + log_binomial(m + k - 1, k - 1);
        if (m > 0) {
          if (pe == 0.0) continue;
          lw += m * std::log(pe);
        }
        for (int i = 0; i <= k - 1; ++i) {
          const double y = base - i * t_tr;
          if (y <= 0.0) break;
          const double sign = (i % 2 == 0) ? 1.0 : -1.0;
          const double l = lw + log_binomial(k - 1, i) + (i + 1) * std::log(p) +
                           (k - 2) * std::log(y) - std::lgamma(k - 1) - (k - 1) * std::log(mu) -
                           y / mu;
          f += sign * std::exp(l);
        }
      }
    }
  }
  return f;
}

}  // namespace

double closed_form_density(const TrafficModel& model, const PacketSpec& packet,
                           const SensingMode& mode, PuState state, double t) {
  validate(mode);
  if (t <= 0.0) return 0.0;
  const double lambda = model.lambda(), mu = model.mu(), t_tr = packet.t_tr();
  if (std::holds_alternative<ContinuousSensing>(mode)) {
    return state == PuState::kOn ? continuous_on(lambda, mu, t_tr, t)
                                 : continuous_off(lambda, mu, t_tr, t);
  }
  const double ts = sensing_interval(mode);
  const double beta = busy_persistence_beta(model, ts);
  if (std::holds_alternative<PeriodicPerfectSensing>(mode)) {
    return state == PuState::kOn ? periodic_on(mu, t_tr, ts, beta, t)
                                 : periodic_off(mu, t_tr, ts, beta, t);
  }
  return imperfect(mu, t_tr, ts, beta, missed_detection(mode), state == PuState::kOn, t);
}

}  // namespace edtlab
