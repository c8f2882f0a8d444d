#include "edtlab/analytic_edt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "edtlab/errors.hpp"
#include "edtlab/queueing.hpp"
#include "edtlab/slot_mgf.hpp"
#include "edtlab/slot_propagation.hpp"

namespace edtlab {

namespace {

constexpr double kHorizonGrowth = 1.25;
constexpr int kMaxHorizonSteps = 200;

double worst_tail(const WaitingMgf& on, const WaitingMgf& off, double h) {
  return std::max(on.certificate(h).bound(h), off.certificate(h).bound(h));
}

MixedDistribution certify(WaitingSolution sol, const WaitingMgf& mgf, double horizon) {
  return MixedDistribution(std::move(sol.atoms), std::move(sol.density), mgf.certificate(horizon));
}

EdtQuery with_mode(const EdtQuery& query, SensingMode mode) {
  EdtQuery q = query;
  q.mode = mode;
  return q;
}

}  // namespace

void validate(const EdtQuery& query) {
  validate(query.mode);
  if (query.horizon != 0.0 && !(query.horizon > query.packet.t_tr())) {
    throw EdtError(ErrorCode::kInvalidArgument, "horizon must exceed the transmission time");
  }
  if (!(query.tolerance > 0.0 && query.tolerance <= 1e-3)) {
    throw EdtError(ErrorCode::kInvalidArgument, "tolerance must lie in (0, 1e-3]");
  }
  if (!(query.grid_resolution >= 10.0) || !std::isfinite(query.grid_resolution)) {
    throw EdtError(ErrorCode::kInvalidArgument, "grid resolution must be >= 10");
  }
}

double waiting_horizon(const EdtQuery& query) {
  validate(query);
  const WaitingMgf on(query.model, query.packet, query.mode, PuState::kOn);
  const WaitingMgf off(query.model, query.packet, query.mode, PuState::kOff);
  if (query.horizon > 0.0) {
    const double h = query.horizon - query.packet.t_tr();
    const double tail = worst_tail(on, off, h);
    if (tail > query.tolerance) {
      std::ostringstream os;
      os.precision(6);
      os << "tail mass bound " << tail << " beyond horizon " << query.horizon
         << " exceeds tolerance " << query.tolerance;
      throw EdtError(ErrorCode::kTruncationFailure, os.str());
    }
    return h;
  }
  const ServiceMoments sm = service_moments_general(query.model, query.packet, query.mode);
  double h = 20.0 * sm.m1_on;
  for (int i = 0; i < kMaxHorizonSteps; ++i) {
    if (worst_tail(on, off, h) <= query.tolerance) return h;
    h *= kHorizonGrowth;
  }
  throw EdtError(ErrorCode::kTruncationFailure, "no horizon meets the tail tolerance");
}

WaitingPair waiting_distributions(const EdtQuery& query) {
  const double h = waiting_horizon(query);
  const PropagationMesh mesh =
      build_mesh(query.model, query.packet, query.mode, h, query.grid_resolution);
  const WaitingMgf on(query.model, query.packet, query.mode, PuState::kOn);
  const WaitingMgf off(query.model, query.packet, query.mode, PuState::kOff);
  return {certify(propagate_waiting(mesh, query.model, query.packet, query.mode, PuState::kOn), on,
                  mesh.horizon()),
          certify(propagate_waiting(mesh, query.model, query.packet, query.mode, PuState::kOff),
                  off, mesh.horizon())};
}

MixedDistribution waiting_distribution(const EdtQuery& query, PuState state) {
  const double h = waiting_horizon(query);
  const PropagationMesh mesh =
      build_mesh(query.model, query.packet, query.mode, h, query.grid_resolution);
  const WaitingMgf mgf(query.model, query.packet, query.mode, state);
  return certify(propagate_waiting(mesh, query.model, query.packet, query.mode, state), mgf,
                 mesh.horizon());
}

MixedDistribution waiting_dist_continuous(const TrafficModel& model, const PacketSpec& packet,
                                          PuState state, const EdtQuery& query) {
  EdtQuery q = with_mode(query, ContinuousSensing{});
  q.model = model;
  q.packet = packet;
  return waiting_distribution(q, state);
}

MixedDistribution waiting_dist_periodic(const TrafficModel& model, const PacketSpec& packet,
                                        double ts, PuState state, const EdtQuery& query) {
  EdtQuery q = with_mode(query, PeriodicPerfectSensing{ts});
  q.model = model;
  q.packet = packet;
  return waiting_distribution(q, state);
}

MixedDistribution waiting_dist_imperfect(const TrafficModel& model, const PacketSpec& packet,
                                         double ts, double pe, PuState state,
                                         const EdtQuery& query) {
  EdtQuery q = with_mode(query, PeriodicImperfectSensing{ts, pe});
  q.model = model;
  q.packet = packet;
  return waiting_distribution(q, state);
}

MixedDistribution edt_from_waiting(const WaitingPair& pair, const TrafficModel& model,
                                   const PacketSpec& packet) {
  const auto [w_on, w_off] = stationary_probabilities(model);
  return MixedDistribution::mixture(pair.on, w_on, pair.off, w_off).shifted(packet.t_tr());
}

MixedDistribution edt_distribution(const EdtQuery& query) {
  return edt_from_waiting(waiting_distributions(query), query.model, query.packet);
}

double mgf_waiting(const TrafficModel& model, const PacketSpec& packet, const SensingMode& mode,
                   PuState state, double s) {
  return mgf_waiting_series(model, packet, mode, state, s);
}

double cdf(const MixedDistribution& dist, double t) { return dist.cdf(t); }

MomentEstimate moments(const MixedDistribution& dist, int order) {
  if (order != 1 && order != 2) {
    throw EdtError(ErrorCode::kOutOfRange, "moment order must be 1 or 2");
  }
  return dist.moment(order);
}

}  // namespace edtlab
