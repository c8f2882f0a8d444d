#pragma once

#include "edtlab/primary_model.hpp"

namespace edtlab {

/// Moments of one waiting slot and one wasted transmission slot under
/// perfect periodic sensing.
struct SlotMoments {
  double wait_m1;
  double wait_m2;
  double waste_m1;
  double waste_m2;
};

SlotMoments slot_moments(const TrafficModel& model, const PacketSpec& packet, double ts);

/// First two moments of a nonnegative random variable.
struct Moments2 {
  double m1;
  double m2;
};

/// Moments of one wasted transmission slot (exponential truncated to [0, T_tr)).
Moments2 waste_moments(const TrafficModel& model, const PacketSpec& packet);

/// Moments of one waiting slot for any sensing mode. Under imperfect sensing
/// this includes the missed-detection delay that follows.
Moments2 wait_moments(const TrafficModel& model, const SensingMode& mode);

/// Moments of the delay before the first transmission slot.
Moments2 first_slot_moments(const TrafficModel& model, const SensingMode& mode, PuState state);

struct ServiceMoments {
  double m1_off;
  double m2_off;
  double m1_on;
  double m2_on;
};

/// Closed forms for perfect periodic sensing.
ServiceMoments service_moments(const TrafficModel& model, const PacketSpec& packet, double ts);

/// Compound-geometric service moments valid for every sensing mode. For
/// perfect periodic sensing they agree with service_moments(). Continuous and
/// imperfect sensing are an extension of the periodic analysis.
ServiceMoments service_moments_general(const TrafficModel& model, const PacketSpec& packet,
                                       const SensingMode& mode);

/// Probability that a packet arriving to an empty queue finds the PU on.
double p_on_type2(const TrafficModel& model, double psi);

struct TypeMoments {
  double e1_t;
  double e1_t2;
  double e2_t;
  double e2_t2;
};

TypeMoments type_moments(const ServiceMoments& sm, double p_on2);

struct QueueConfig {
  TrafficModel model;
  PacketSpec packet;
  SensingMode mode;
  double psi;
};

struct DelayResult {
  double psi;
  double e1_t;
  double e2_t;
  double e1_t2;
  double e2_t2;
  /// Fraction of packets that arrive to an empty system.
  double type2_fraction;
  /// Arrival-weighted second moment of service time.
  double et2;
  double mean_delay;
  double mean_queue_length;
  bool stable;
};

/// Mean sojourn time and mean queue length of the FIFO queue with Poisson
/// arrivals of mean interarrival time psi. Unstable configurations
/// (psi <= E1[t]) return stable=false with infinite delay and queue length.
DelayResult mean_delay(const QueueConfig& config);

}  // namespace edtlab
