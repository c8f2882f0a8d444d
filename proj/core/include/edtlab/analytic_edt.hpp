#pragma once

#include "edtlab/mixed_distribution.hpp"
#include "edtlab/primary_model.hpp"

namespace edtlab {

struct EdtQuery {
  TrafficModel model;
  PacketSpec packet;
  SensingMode mode;
  /// Truncation horizon of the EDT distribution; 0 selects
  /// T_tr + 20 E[ST_on], extended until the tail bound meets `tolerance`.
  double horizon = 0.0;
  /// Largest admissible certified tail mass.
  double tolerance = 1e-8;
  /// Points per unit time; caps the cell width at 11 / grid_resolution.
  double grid_resolution = 10.0;
};

/// Throws kInvalidArgument unless horizon is 0 or > t_tr, tolerance lies in
/// (0, 1e-3] and grid_resolution >= 10.
void validate(const EdtQuery& query);

/// Waiting-time horizon the query resolves to. Throws kTruncationFailure when
/// an explicit horizon leaves more than `tolerance` of tail mass.
double waiting_horizon(const EdtQuery& query);

struct WaitingPair {
  MixedDistribution on;
  MixedDistribution off;
};

/// Both initial-state waiting laws on one shared mesh.
WaitingPair waiting_distributions(const EdtQuery& query);

MixedDistribution waiting_distribution(const EdtQuery& query, PuState state);

MixedDistribution waiting_dist_continuous(const TrafficModel& model, const PacketSpec& packet,
                                          PuState state, const EdtQuery& query);
MixedDistribution waiting_dist_periodic(const TrafficModel& model, const PacketSpec& packet,
                                        double ts, PuState state, const EdtQuery& query);
MixedDistribution waiting_dist_imperfect(const TrafficModel& model, const PacketSpec& packet,
                                         double ts, double pe, PuState state,
                                         const EdtQuery& query);

/// Stationary mixture of the two waiting laws shifted by T_tr.
MixedDistribution edt_distribution(const EdtQuery& query);

/// Same, from an already computed pair.
MixedDistribution edt_from_waiting(const WaitingPair& pair, const TrafficModel& model,
                                   const PacketSpec& packet);

/// E[e^{s T_w}] by series summation over slot counts.
double mgf_waiting(const TrafficModel& model, const PacketSpec& packet, const SensingMode& mode,
                   PuState state, double s);

/// P(X <= t).
double cdf(const MixedDistribution& dist, double t);

/// E[X^order] for order 1 or 2, with the truncated-tail bound as uncertainty.
MomentEstimate moments(const MixedDistribution& dist, int order);

}  // namespace edtlab
