#include <gtest/gtest.h>

#include <cmath>

#include "edtlab/queueing.hpp"
#include "edtlab/slot_mgf.hpp"

namespace {

using namespace edtlab;

const TrafficModel kModel(10, 6);
const PacketSpec kPacket(1);
constexpr double kTs = 0.5;

TEST(SlotMoments, ClosedForms) {
  const double beta = busy_persistence_beta(kModel, kTs);
  const SlotMoments m = slot_moments(kModel, kPacket, kTs);
  EXPECT_NEAR(m.wait_m1, kTs / (1 - beta), 1e-14);
  EXPECT_NEAR(m.wait_m2, kTs * kTs * (1 + beta) / ((1 - beta) * (1 - beta)), 1e-12);
  const double p = std::exp(-1.0 / 6.0);
  EXPECT_NEAR(m.waste_m1, 6 - p / (1 - p), 1e-12);
  EXPECT_NEAR(slot_moments(kModel, PacketSpec(1e4), kTs).waste_m1, 6.0, 1e-12);
}

TEST(SlotMoments, FiniteDifferenceOfTransforms) {
  const SlotMoments m = slot_moments(kModel, kPacket, kTs);
  const WaitingMgf w(kModel, kPacket, PeriodicPerfectSensing{kTs}, PuState::kOff);
  const double h = 1e-5, q = 1 - std::exp(-1.0 / 6.0);
  EXPECT_NEAR((w.wait_slot(h) - w.wait_slot(-h)) / (2 * h), m.wait_m1, 1e-6);
  EXPECT_NEAR((w.failed_slot(h) - w.failed_slot(-h)) / (2 * h) / q, m.waste_m1, 1e-6);
  const double h2 = 1e-4;
  EXPECT_NEAR((w.wait_slot(h2) - 2 * w.wait_slot(0) + w.wait_slot(-h2)) / (h2 * h2), m.wait_m2,
              1e-4 * m.wait_m2);
}

TEST(SlotMoments, VarianceNonnegativeOnGrid) {
  for (double lambda : {0.5, 3.0, 10.0}) {
    for (double mu : {0.5, 2.0, 6.0}) {
      for (double t : {0.1, 1.0, 4.0}) {
        for (double ts : {0.05, 0.5, 2.0}) {
          const TrafficModel m(lambda, mu);
          const SlotMoments s = slot_moments(m, PacketSpec(t), ts);
          EXPECT_GE(s.wait_m2, s.wait_m1 * s.wait_m1);
          EXPECT_GE(s.waste_m2, s.waste_m1 * s.waste_m1);
          const ServiceMoments sm = service_moments(m, PacketSpec(t), ts);
          EXPECT_GE(sm.m2_off, sm.m1_off * sm.m1_off);
          EXPECT_GE(sm.m2_on, sm.m1_on * sm.m1_on);
          EXPECT_GT(sm.m1_on, sm.m1_off);
        }
      }
    }
  }
}

TEST(ServiceMoments, IdentitiesAndLimits) {
  const double beta = busy_persistence_beta(kModel, kTs);
  const ServiceMoments sm = service_moments(kModel, kPacket, kTs);
  EXPECT_NEAR(sm.m1_on, sm.m1_off + kTs / (1 - beta), 1e-12);
  const SlotMoments m = slot_moments(kModel, kPacket, kTs);
  const double p = std::exp(-1.0 / 6.0);
  EXPECT_NEAR(sm.m1_off, p * 1.0 + (1 - p) * (m.waste_m1 + m.wait_m1 + sm.m1_off), 1e-10);
  const ServiceMoments tiny = service_moments(kModel, PacketSpec(1e-10), kTs);
  EXPECT_NEAR(tiny.m1_off, 0.0, 1e-9);
  EXPECT_NEAR(tiny.m1_on, kTs / (1 - beta), 1e-9);
  const ServiceMoments gen = service_moments_general(kModel, kPacket, PeriodicPerfectSensing{kTs});
  EXPECT_NEAR(gen.m1_off, sm.m1_off, 1e-12 * sm.m1_off);
  EXPECT_NEAR(gen.m2_off, sm.m2_off, 1e-10 * sm.m2_off);
  EXPECT_NEAR(gen.m1_on, sm.m1_on, 1e-12 * sm.m1_on);
  EXPECT_NEAR(gen.m2_on, sm.m2_on, 1e-10 * sm.m2_on);
}

TEST(Queueing, PonType2) {
  EXPECT_NEAR(p_on_type2(kModel, 3.0), 30.0 / 108.0, 1e-15);
  EXPECT_NEAR(p_on_type2(kModel, 1e12), 10.0 / 16.0, 1e-9);
  EXPECT_NEAR(p_on_type2(kModel, 1e-12), 0.0, 1e-12);
  EXPECT_THROW(p_on_type2(kModel, 0.0), std::exception);
}

TEST(Queueing, TypeMoments) {
  const ServiceMoments sm = service_moments(kModel, kPacket, kTs);
  const TypeMoments t0 = type_moments(sm, 0.0);
  EXPECT_EQ(t0.e2_t, t0.e1_t);
  EXPECT_EQ(t0.e2_t2, t0.e1_t2);
  EXPECT_EQ(t0.e1_t, sm.m1_off);
  const TypeMoments t1 = type_moments(sm, 1.0);
  EXPECT_EQ(t1.e2_t, sm.m1_on);
  EXPECT_EQ(t1.e2_t2, sm.m2_on);
}

TEST(Queueing, MatchesTwoTermExceptionalServiceForm) {
  for (double psi : {8.0, 15.0, 40.0}) {
    const DelayResult r = mean_delay({kModel, kPacket, PeriodicPerfectSensing{kTs}, psi});
    ASSERT_TRUE(r.stable);
    // Waiting time of M/G/1 with exceptional first service, written per type.
    const double a = 1 / psi;
    const double wq = a * r.e1_t2 / (2 * (1 - a * r.e1_t)) +
                      a * (r.e2_t2 - r.e1_t2) / (2 * (1 + a * r.e2_t - a * r.e1_t));
    const double p0 = (1 - a * r.e1_t) / (1 - a * r.e1_t + a * r.e2_t);
    EXPECT_NEAR(r.type2_fraction, p0, 1e-14);
    EXPECT_NEAR(r.mean_delay, wq + p0 * r.e2_t + (1 - p0) * r.e1_t, 1e-10 * r.mean_delay);
    EXPECT_NEAR(r.mean_queue_length, wq / psi, 1e-10 * r.mean_queue_length);
    EXPECT_GE(r.mean_delay, r.e2_t);
  }
}

TEST(Queueing, StabilityAndMonotonicity) {
  const ServiceMoments sm = service_moments(kModel, kPacket, kTs);
  const DelayResult unstable = mean_delay({kModel, kPacket, PeriodicPerfectSensing{kTs}, sm.m1_off});
  EXPECT_FALSE(unstable.stable);
  EXPECT_TRUE(std::isinf(unstable.mean_delay));
  EXPECT_TRUE(std::isinf(unstable.mean_queue_length));
  double prev = INFINITY;
  for (double f = 1.01; f < 200; f *= 1.3) {
    const DelayResult r = mean_delay({kModel, kPacket, PeriodicPerfectSensing{kTs}, f * sm.m1_off});
    EXPECT_TRUE(r.stable);
    EXPECT_LT(r.mean_delay, prev);
    prev = r.mean_delay;
  }
  const DelayResult sparse = mean_delay({kModel, kPacket, PeriodicPerfectSensing{kTs}, 1e9});
  EXPECT_NEAR(sparse.mean_delay, 0.625 * sm.m1_on + 0.375 * sm.m1_off, 1e-6);
  EXPECT_NEAR(sparse.mean_queue_length, 0.0, 1e-9);
}

}  // namespace
