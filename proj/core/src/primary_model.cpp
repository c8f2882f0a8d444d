#include "edtlab/primary_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "edtlab/errors.hpp"

namespace edtlab {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kNonPositiveInput: return "NonPositiveInput";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kSingularParameter: return "SingularParameter";
    case ErrorCode::kZeroPoleOffset: return "ZeroPoleOffset";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kTruncationFailure: return "TruncationFailure";
    case ErrorCode::kDivergentSeries: return "DivergentSeries";
    case ErrorCode::kIoFailure: return "IOFailure";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

TrafficModel::TrafficModel(double lambda, double mu) : lambda_(lambda), mu_(mu) {
  if (!positive_finite(lambda) || !positive_finite(mu)) {
    std::ostringstream os;
    os << "traffic model needs lambda > 0 and mu > 0 (got " << lambda << ", " << mu << ")";
    throw EdtError(ErrorCode::kNonPositiveInput, os.str());
  }
}

PacketSpec::PacketSpec(double t_tr) : t_tr_(t_tr) {
  if (!positive_finite(t_tr)) {
    throw EdtError(ErrorCode::kNonPositiveInput, "packet transmission time must be > 0");
  }
}

void validate(const SensingMode& mode) {
  if (const auto* p = std::get_if<PeriodicPerfectSensing>(&mode)) {
    if (!positive_finite(p->ts)) {
      throw EdtError(ErrorCode::kInvalidArgument, "sensing interval must be > 0");
    }
  } else if (const auto* im = std::get_if<PeriodicImperfectSensing>(&mode)) {
    if (!positive_finite(im->ts)) {
      throw EdtError(ErrorCode::kInvalidArgument, "sensing interval must be > 0");
    }
    if (!(im->pe >= 0.0 && im->pe < 1.0)) {
      throw EdtError(ErrorCode::kInvalidArgument, "missed-detection probability must lie in [0, 1)");
    }
  }
}

double sensing_interval(const SensingMode& mode) noexcept {
  if (const auto* p = std::get_if<PeriodicPerfectSensing>(&mode)) return p->ts;
  if (const auto* im = std::get_if<PeriodicImperfectSensing>(&mode)) return im->ts;
  return 0.0;
}

double missed_detection(const SensingMode& mode) noexcept {
  if (const auto* im = std::get_if<PeriodicImperfectSensing>(&mode)) return im->pe;
  return 0.0;
}

std::string describe(const SensingMode& mode) {
  std::ostringstream os;
  os.precision(12);
  if (std::holds_alternative<ContinuousSensing>(mode)) {
    os << "continuous";
  } else if (const auto* p = std::get_if<PeriodicPerfectSensing>(&mode)) {
    os << "periodic(ts=" << p->ts << ")";
  } else if (const auto* im = std::get_if<PeriodicImperfectSensing>(&mode)) {
    os << "imperfect(ts=" << im->ts << ", pe=" << im->pe << ")";
  }
  return os.str();
}

const char* to_string(PuState state) noexcept { return state == PuState::kOn ? "on" : "off"; }

StationaryProbabilities stationary_probabilities(const TrafficModel& model) noexcept {
  const double total = model.lambda() + model.mu();
  const double on = model.lambda() / total;
  // off is derived from on so that the pair sums to exactly 1.
  return {on, 1.0 - on};
}

double busy_persistence_beta(const TrafficModel& model, double ts) {
  if (!positive_finite(ts)) {
    throw EdtError(ErrorCode::kInvalidArgument, "sensing interval must be > 0");
  }
  const auto [on, off] = stationary_probabilities(model);
  return on + off * std::exp(-model.alpha() * ts);
}

double slot_success_probability(const TrafficModel& model, const PacketSpec& packet) noexcept {
  return std::exp(-packet.t_tr() / model.mu());
}

double success_probability(const TrafficModel& model, const PacketSpec& packet, std::int64_t k) {
  if (k < 1) {
    throw EdtError(ErrorCode::kOutOfRange, "slot index k must be >= 1");
  }
  const double p = slot_success_probability(model, packet);
  // (1 - p)^(k-1) via log1p keeps accuracy when p is close to 1.
  const double fail = -std::expm1(-packet.t_tr() / model.mu());
  if (k == 1) return p;
  return p * std::exp(static_cast<double>(k - 1) * std::log(fail));
}

double estimate_transmission_time(double entropy_bits, double bandwidth_hz,
                                  double mean_spectral_efficiency) {
  if (!positive_finite(entropy_bits) || !positive_finite(bandwidth_hz) ||
      !positive_finite(mean_spectral_efficiency)) {
    throw EdtError(ErrorCode::kNonPositiveInput,
                   "entropy, bandwidth and spectral efficiency must all be > 0");
  }
  return entropy_bits / (bandwidth_hz * mean_spectral_efficiency);
}

double ergodic_spectral_efficiency(const std::function<double(double)>& snr_pdf, double upper) {
  if (!(upper > 0.0)) {
    throw EdtError(ErrorCode::kNonPositiveInput, "integration range must be > 0");
  }
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [&](double g) { return std::log2(1.0 + g) * snr_pdf(g); };
  double error = 0.0;
  const double value =
      gauss_kronrod<double, 31>::integrate(integrand, 0.0, upper, 20, 1e-13, &error);
  if (!positive_finite(value)) {
    throw EdtError(ErrorCode::kNonPositiveInput, "SNR density yields non-positive efficiency");
  }
  return value;
}

double ergodic_spectral_efficiency(std::span<const double> snr, std::span<const double> pdf) {
  if (snr.size() != pdf.size() || snr.size() < 2) {
    throw EdtError(ErrorCode::kInvalidArgument, "SNR table needs >= 2 matching points");
  }
  if (!std::is_sorted(snr.begin(), snr.end()) || snr.front() < 0.0) {
    throw EdtError(ErrorCode::kInvalidArgument, "SNR abscissae must be nonnegative and sorted");
  }
  // Each linear piece is integrated separately so kinks never fall inside a
  // quadrature panel.
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < snr.size(); ++j) {
    const double x0 = snr[j], x1 = snr[j + 1];
    if (x1 <= x0) continue;
    const double y0 = pdf[j], y1 = pdf[j + 1];
    auto piece = [&](double g) {
      const double w = (g - x0) / (x1 - x0);
      return std::log2(1.0 + g) * (y0 + w * (y1 - y0));
    };
    total += gauss_kronrod<double, 15>::integrate(piece, x0, x1, 8, 1e-14);
  }
  if (!positive_finite(total)) {
    throw EdtError(ErrorCode::kNonPositiveInput, "SNR table yields non-positive efficiency");
  }
  return total;
}

}  // namespace edtlab
