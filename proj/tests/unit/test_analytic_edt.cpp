#include <gtest/gtest.h>

#include <cmath>

#include "edtlab/analytic_edt.hpp"
#include "edtlab/closed_form.hpp"
#include "edtlab/errors.hpp"
#include "edtlab/queueing.hpp"
#include "edtlab/slot_mgf.hpp"
#include "edtlab/slot_propagation.hpp"

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

const TrafficModel kModel(3, 2);
const PacketSpec kPacket(4);
const double kE2 = std::exp(-2.0);
// Off-case waiting mean: (e^2 - 1) failed slots, each a truncated
// exponential waste plus an exponential wait of mean 3.
const double kWaitOffMean = (std::exp(2.0) - 1) * (2 - 4 * kE2 / (1 - kE2) + 3);

EdtQuery query(SensingMode mode) { return EdtQuery{kModel, kPacket, mode}; }

// Continuous off-case transform with geometric slot count, written out.
double continuous_off_mgf(double s) {
  const double p = kE2;
  const double failed = (1 - std::exp((s - 0.5) * 4)) / (1 - 2 * s);
  return p / (1 - failed / (1 - 3 * s));
}

class AnalyticFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    continuous_ = new WaitingPair(waiting_distributions(query(ContinuousSensing{})));
    periodic_ = new WaitingPair(waiting_distributions(query(PeriodicPerfectSensing{0.5})));
  }
  static void TearDownTestSuite() {
    delete continuous_;
    delete periodic_;
  }
  static WaitingPair* continuous_;
  static WaitingPair* periodic_;
};

WaitingPair* AnalyticFixture::continuous_ = nullptr;
WaitingPair* AnalyticFixture::periodic_ = nullptr;

TEST_F(AnalyticFixture, ContinuousOffAtomAndMean) {
  const MixedDistribution& off = continuous_->off;
  EXPECT_NEAR(off.atom_at(0.0), kE2, 1e-15);
  EXPECT_NEAR(moments(off, 1).value, kWaitOffMean, 1e-8);
  EXPECT_NEAR(kWaitOffMean, 27.945280494, 1e-8);
  EXPECT_NEAR(moments(continuous_->on, 1).value, kWaitOffMean + 3, 1e-8);
  EXPECT_TRUE(continuous_->on.atoms().empty());
}

TEST_F(AnalyticFixture, ContinuousEdt) {
  const MixedDistribution edt = edt_from_waiting(*continuous_, kModel, kPacket);
  EXPECT_NEAR(edt.atom_at(4.0), 0.4 * kE2, 1e-12);
  EXPECT_NEAR(moments(edt, 1).value, 0.6 * (kWaitOffMean + 3) + 0.4 * kWaitOffMean + 4, 1e-8);
  EXPECT_EQ(cdf(edt, 3.999), 0.0);
  EXPECT_EQ(edt.cdf_left(4.0), 0.0);
  EXPECT_NEAR(std::fabs(edt.total_mass() + edt.tail_mass_bound() - 1), 0.0, 1e-7);
  // Mixture consistency.
  for (double t : {4.5, 9.0, 20.0, 61.3}) {
    EXPECT_NEAR(edt.pdf(t), 0.6 * continuous_->on.pdf(t - 4) + 0.4 * continuous_->off.pdf(t - 4),
                1e-14);
    EXPECT_NEAR(edt.cdf(t),
                0.6 * continuous_->on.cdf(t - 4) + 0.4 * continuous_->off.cdf(t - 4), 1e-13);
  }
}

TEST_F(AnalyticFixture, PeriodicOnAtoms) {
  const double beta = busy_persistence_beta(kModel, 0.5);
  const MixedDistribution& on = periodic_->on;
  EXPECT_NEAR(on.atom_at(0.5), kE2 * (1 - beta), 1e-15);
  EXPECT_NEAR(on.atom_at(1.5), kE2 * (1 - beta) * beta * beta, 1e-15);
  EXPECT_EQ(on.atom_at(0.0), 0.0);
  EXPECT_NEAR(periodic_->off.atom_at(0.0), kE2, 1e-15);
}

TEST_F(AnalyticFixture, NormalizationAndNonnegativity) {
  for (const WaitingPair* p : {continuous_, periodic_}) {
    for (const MixedDistribution* d : {&p->on, &p->off}) {
      EXPECT_NEAR(d->total_mass(), 1.0, 1e-6);
      EXPECT_LE(d->tail_mass_bound(), 1e-8);
      EXPECT_GE(d->density().min_node_value(), -1e-12);
      EXPECT_NEAR(cdf(*d, d->support_end()), 1.0, 1e-6);
    }
  }
}

TEST_F(AnalyticFixture, OnCaseIsStochasticallyLarger) {
  for (const WaitingPair* p : {continuous_, periodic_}) {
    for (double t = 0.0; t < 200.0; t += 0.37) EXPECT_LE(p->on.cdf(t), p->off.cdf(t) + 1e-12);
  }
}

TEST_F(AnalyticFixture, LaplaceMatchesSeriesMgf) {
  for (double s : {-0.05, -0.1, -0.5}) {
    EXPECT_NEAR(continuous_->off.laplace(s),
                mgf_waiting(kModel, kPacket, ContinuousSensing{}, PuState::kOff, s), 1e-6);
    EXPECT_NEAR(continuous_->off.laplace(s), continuous_off_mgf(s), 1e-6);
    EXPECT_NEAR(periodic_->on.laplace(s),
                mgf_waiting(kModel, kPacket, PeriodicPerfectSensing{0.5}, PuState::kOn, s), 1e-6);
  }
}

TEST_F(AnalyticFixture, ClosedFormDensityAgrees) {
  struct Case {
    const WaitingPair* pair;
    SensingMode mode;
  };
  for (const Case& c : {Case{continuous_, ContinuousSensing{}},
                        Case{periodic_, PeriodicPerfectSensing{0.5}}}) {
    for (PuState st : {PuState::kOn, PuState::kOff}) {
      const MixedDistribution& d = st == PuState::kOn ? c.pair->on : c.pair->off;
      for (double t : {0.7, 3.3, 5.9, 11.2, 17.45}) {
        const double ref = closed_form_density(kModel, kPacket, c.mode, st, t);
        EXPECT_NEAR(d.pdf(t), ref, 1e-9 * (1 + std::fabs(ref))) << describe(c.mode) << " t=" << t;
      }
    }
  }
}

TEST_F(AnalyticFixture, SecondMomentMatchesServiceMoments) {
  const ServiceMoments sm = service_moments(kModel, kPacket, 0.5);
  const auto shifted_m2 = [](const MixedDistribution& d) {
    return moments(d, 2).value + 8 * moments(d, 1).value + 16;
  };
  EXPECT_NEAR(shifted_m2(periodic_->off), sm.m2_off, 1e-6 * sm.m2_off);
  EXPECT_NEAR(shifted_m2(periodic_->on), sm.m2_on, 1e-6 * sm.m2_on);
  EXPECT_NEAR(moments(periodic_->off, 1).value + 4, sm.m1_off, 1e-8 * sm.m1_off);
}

TEST(AnalyticEdt, ImperfectWithZeroMissEqualsPeriodic) {
  const WaitingPair a = waiting_distributions(query(PeriodicPerfectSensing{0.5}));
  const WaitingPair b = waiting_distributions(query(PeriodicImperfectSensing{0.5, 0.0}));
  ASSERT_EQ(a.on.atoms().size(), b.on.atoms().size());
  for (std::size_t i = 0; i < a.on.atoms().size(); ++i) {
    EXPECT_NEAR(a.on.atoms()[i].mass, b.on.atoms()[i].mass, 1e-10);
  }
  for (double t = 0.1; t < 60; t += 0.77) EXPECT_NEAR(a.off.pdf(t), b.off.pdf(t), 1e-10);
}

TEST(AnalyticEdt, ImperfectAtoms) {
  const WaitingPair w = waiting_distributions(query(PeriodicImperfectSensing{0.5, 0.1}));
  EXPECT_NEAR(w.off.atom_at(0.0), 0.9 * kE2, 1e-15);
  EXPECT_NEAR(w.off.atom_at(0.5), 0.9 * 0.1 * kE2, 1e-12);
  EXPECT_NEAR(w.off.total_mass(), 1.0, 1e-6);
  EXPECT_NEAR(w.on.total_mass(), 1.0, 1e-6);
  for (double t : {1.3, 6.1, 12.4}) {
    const double ref =
        closed_form_density(kModel, kPacket, PeriodicImperfectSensing{0.5, 0.1}, PuState::kOff, t);
    EXPECT_NEAR(w.off.pdf(t), ref, 1e-9 * (1 + ref));
  }
}

TEST(AnalyticEdt, TinyTransmissionTimeDegenerates) {
  // Breakpoints sit at multiples of T_tr, so the mesh limit bounds how
  // small T_tr may get; 1e-3 keeps the count near 1e5.
  const EdtQuery q{kModel, PacketSpec(1e-3), ContinuousSensing{}};
  const MixedDistribution off = waiting_distribution(q, PuState::kOff);
  EXPECT_NEAR(off.atom_at(0.0), std::exp(-5e-4), 1e-15);
  EXPECT_GT(off.cdf(0.5), 1 - 1e-3);
  EXPECT_NEAR(off.total_mass(), 1.0, 1e-6);
}

TEST(AnalyticEdt, QueryValidation) {
  EdtQuery q = query(ContinuousSensing{});
  q.tolerance = 0.0;
  expect_code([&] { validate(q); }, ErrorCode::kInvalidArgument);
  q = query(ContinuousSensing{});
  q.grid_resolution = 5;
  expect_code([&] { validate(q); }, ErrorCode::kInvalidArgument);
  q = query(ContinuousSensing{});
  q.horizon = 3.0;
  expect_code([&] { validate(q); }, ErrorCode::kInvalidArgument);
  q = query(ContinuousSensing{});
  q.horizon = 6.0;
  expect_code([&] { edt_distribution(q); }, ErrorCode::kTruncationFailure);
  expect_code([&] { moments(MixedDistribution{}, 3); }, ErrorCode::kOutOfRange);
}

TEST(SlotMgf, NormalizationAndDerivative) {
  for (const SensingMode& m : {SensingMode{ContinuousSensing{}},
                               SensingMode{PeriodicPerfectSensing{0.5}},
                               SensingMode{PeriodicImperfectSensing{0.5, 0.2}}}) {
    for (PuState st : {PuState::kOn, PuState::kOff}) {
      // The series stops at a relative tail of 1e-12.
      EXPECT_NEAR(mgf_waiting(kModel, kPacket, m, st, 0.0), 1.0, 1e-10);
      const WaitingMgf w(kModel, kPacket, m, st);
      EXPECT_NEAR(w.value(-0.2), mgf_waiting_series(kModel, kPacket, m, st, -0.2), 1e-10);
    }
  }
  const double h = 1e-5;
  const double d = (mgf_waiting(kModel, kPacket, ContinuousSensing{}, PuState::kOff, h) -
                    mgf_waiting(kModel, kPacket, ContinuousSensing{}, PuState::kOff, -h)) /
                   (2 * h);
  EXPECT_NEAR(d, kWaitOffMean, 1e-5);
}

TEST(SlotMgf, IndependentContinuousForm) {
  const WaitingMgf w(kModel, kPacket, ContinuousSensing{}, PuState::kOff);
  for (double s : {-1.0, -0.3, 0.005, 0.01}) {
    EXPECT_NEAR(w.value(s), continuous_off_mgf(s), 1e-12 * continuous_off_mgf(s));
  }
  EXPECT_GT(w.s_max(), 0.0);
  EXPECT_TRUE(std::isinf(w.log_value(w.s_max())));
  expect_code([] { mgf_waiting(kModel, kPacket, ContinuousSensing{}, PuState::kOff, 0.5); },
              ErrorCode::kDivergentSeries);
}

TEST(SlotPropagation, MeshBreakpoints) {
  const PropagationMesh mesh = build_mesh(kModel, kPacket, PeriodicPerfectSensing{0.5}, 20, 10);
  EXPECT_NEAR(mesh.lattice, 0.5, 1e-12);
  EXPECT_NEAR(mesh.horizon(), 20.0, 1e-12);
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    EXPECT_LE(mesh.edges[c + 1] - mesh.edges[c], mesh.max_cell_width * (1 + 1e-12));
  }
  for (std::size_t p : mesh.piece_starts) {
    const double x = mesh.edges[p] / 0.5;
    EXPECT_NEAR(x, std::round(x), 1e-9);
  }
  expect_code(
      [] {
        build_mesh(TrafficModel(3, 2), PacketSpec(1.0), PeriodicPerfectSensing{M_PI * 1e-3}, 1e5,
                   10);
      },
      ErrorCode::kOutOfRange);
}

}  // namespace
