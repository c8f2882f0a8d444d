#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "edtlab/errors.hpp"
#include "edtlab/primary_model.hpp"

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

// E[ln(1 + X)] for X ~ Exp(1) is the Gompertz constant e E1(1).
constexpr double kGompertz = 0.596347362323194074341;

TEST(PrimaryModel, StationaryProbabilities) {
  auto p = stationary_probabilities(TrafficModel(3, 2));
  EXPECT_DOUBLE_EQ(p.on, 0.6);
  EXPECT_DOUBLE_EQ(p.off, 0.4);
  p = stationary_probabilities(TrafficModel(1, 1));
  EXPECT_DOUBLE_EQ(p.on, 0.5);
  p = stationary_probabilities(TrafficModel(10, 6));
  EXPECT_DOUBLE_EQ(p.on, 0.625);
  EXPECT_DOUBLE_EQ(p.off, 0.375);
}

TEST(PrimaryModel, RejectsNonPositiveInputs) {
  expect_code([] { TrafficModel(-3, 2); }, ErrorCode::kNonPositiveInput);
  expect_code([] { TrafficModel(3, 0); }, ErrorCode::kNonPositiveInput);
  expect_code([] { PacketSpec(0.0); }, ErrorCode::kNonPositiveInput);
  expect_code([] { validate(SensingMode{PeriodicPerfectSensing{0.0}}); },
              ErrorCode::kInvalidArgument);
  expect_code([] { validate(SensingMode{PeriodicImperfectSensing{0.5, 1.0}}); },
              ErrorCode::kInvalidArgument);
}

TEST(PrimaryModel, BusyPersistence) {
  const TrafficModel m(3, 2);
  EXPECT_NEAR(busy_persistence_beta(m, 0.5), 0.6 + 0.4 * std::exp(-5.0 / 12.0), 1e-15);
  EXPECT_NEAR(busy_persistence_beta(m, 1e-9), 1.0, 1e-8);
  EXPECT_NEAR(busy_persistence_beta(m, 1e3), 0.6, 1e-15);
}

TEST(PrimaryModel, SuccessProbabilities) {
  const TrafficModel m(3, 2);
  const PacketSpec p(4);
  const double q = std::exp(-2.0);
  EXPECT_NEAR(slot_success_probability(m, p), q, 1e-16);
  EXPECT_NEAR(success_probability(m, p, 3), q * (1 - q) * (1 - q), 1e-16);
  double total = 0.0;
  for (int k = 1; k <= 400; ++k) total += success_probability(m, p, k);
  EXPECT_NEAR(total, 1.0, 1e-12);
  expect_code([&] { success_probability(m, p, 0); }, ErrorCode::kOutOfRange);
}

TEST(PrimaryModel, TransmissionTime) {
  EXPECT_DOUBLE_EQ(estimate_transmission_time(1000, 100, 2.5), 4.0);
  expect_code([] { estimate_transmission_time(1000, 0, 2.5); }, ErrorCode::kNonPositiveInput);
}

TEST(PrimaryModel, ErgodicEfficiencyExponential) {
  const double eff =
      ergodic_spectral_efficiency([](double g) { return std::exp(-g); }, INFINITY);
  EXPECT_NEAR(eff, kGompertz / std::log(2.0), 1e-10);
}

TEST(PrimaryModel, ErgodicEfficiencyTabulatedMatchesTrapezoid) {
  std::vector<double> g, f;
  for (int i = 0; i <= 4000; ++i) {
    g.push_back(0.01 * i);
    f.push_back(std::exp(-g.back()));
  }
  const double eff = ergodic_spectral_efficiency(g, f);
  // Dense trapezoid over the same piecewise-linear density.
  const int sub = 200;
  double trap = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const double h = (g[i + 1] - g[i]) / sub;
    for (int k = 0; k < sub; ++k) {
      const double x0 = g[i] + k * h, x1 = x0 + h;
      const auto fx = [&](double x) {
        const double w = (x - g[i]) / (g[i + 1] - g[i]);
        return ((1 - w) * f[i] + w * f[i + 1]) * std::log2(1 + x);
      };
      trap += 0.5 * h * (fx(x0) + fx(x1));
    }
  }
  EXPECT_NEAR(eff, trap, 1e-8 * trap);
  EXPECT_NEAR(eff, kGompertz / std::log(2.0), 1e-4);
}

TEST(PrimaryModel, ErgodicEfficiencyUniformTable) {
  const std::vector<double> g{0.0, 2.0}, f{0.5, 0.5};
  EXPECT_NEAR(ergodic_spectral_efficiency(g, f),
              (3 * std::log(3.0) - 2) / (2 * std::log(2.0)), 1e-12);
  const std::vector<double> bad{2.0, 0.0};
  expect_code([&] { ergodic_spectral_efficiency(bad, f); }, ErrorCode::kInvalidArgument);
}

TEST(PrimaryModel, ModeAccessors) {
  const SensingMode c = ContinuousSensing{};
  const SensingMode i = PeriodicImperfectSensing{0.5, 0.2};
  EXPECT_EQ(sensing_interval(c), 0.0);
  EXPECT_EQ(sensing_interval(i), 0.5);
  EXPECT_EQ(missed_detection(i), 0.2);
  EXPECT_EQ(missed_detection(SensingMode{PeriodicPerfectSensing{0.5}}), 0.0);
}

}  // namespace
