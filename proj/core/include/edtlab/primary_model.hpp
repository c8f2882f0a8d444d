#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>

namespace edtlab {

/// Exponential on/off occupancy of the licensed channel.
///
/// `lambda` is the mean busy (PU on) period and `mu` the mean idle (PU off)
/// period. Both share one implicit time unit with every other parameter.
class TrafficModel {
 public:
  TrafficModel(double lambda, double mu);

  double lambda() const noexcept { return lambda_; }
  double mu() const noexcept { return mu_; }

  /// Rate sum 1/lambda + 1/mu of the two-state chain.
  double alpha() const noexcept { return 1.0 / lambda_ + 1.0 / mu_; }

 private:
  double lambda_;
  double mu_;
};

/// Fixed packet transmission time.
class PacketSpec {
 public:
  explicit PacketSpec(double t_tr);

  double t_tr() const noexcept { return t_tr_; }

 private:
  double t_tr_;
};

struct ContinuousSensing {};

struct PeriodicPerfectSensing {
  double ts;
};

/// Periodic sensing where a free channel is missed with probability `pe`.
struct PeriodicImperfectSensing {
  double ts;
  double pe;
};

using SensingMode = std::variant<ContinuousSensing, PeriodicPerfectSensing, PeriodicImperfectSensing>;

/// Throws kInvalidArgument unless ts > 0 and 0 <= pe < 1.
void validate(const SensingMode& mode);

/// Sensing interval, or 0 for continuous sensing.
double sensing_interval(const SensingMode& mode) noexcept;

/// Missed-detection probability, 0 unless imperfect.
double missed_detection(const SensingMode& mode) noexcept;

std::string describe(const SensingMode& mode);

/// PU state at the instant the packet becomes available.
enum class PuState { kOn, kOff };

const char* to_string(PuState state) noexcept;

struct StationaryProbabilities {
  double on;
  double off;
};

StationaryProbabilities stationary_probabilities(const TrafficModel& model) noexcept;

/// P(PU on at a sensing instant | PU on one sensing interval earlier).
double busy_persistence_beta(const TrafficModel& model, double ts);

/// Probability that the k-th transmission slot is the first one long enough.
double success_probability(const TrafficModel& model, const PacketSpec& packet, std::int64_t k);

/// e^{-T_tr/mu}: probability that a single transmission slot succeeds.
double slot_success_probability(const TrafficModel& model, const PacketSpec& packet) noexcept;

/// H / (W * E[log2(1 + snr)]).
double estimate_transmission_time(double entropy_bits, double bandwidth_hz,
                                  double mean_spectral_efficiency);

/// E[log2(1 + snr)] for an SNR density on [0, upper) by adaptive
/// Gauss-Kronrod quadrature. `upper` may be +infinity.
double ergodic_spectral_efficiency(const std::function<double(double)>& snr_pdf,
                                   double upper);

/// Same, for a density tabulated at increasing abscissae and linearly
/// interpolated between them (zero outside the table).
double ergodic_spectral_efficiency(std::span<const double> snr, std::span<const double> pdf);

}  // namespace edtlab
