#pragma once

#include "edtlab/mixed_distribution.hpp"
#include "edtlab/primary_model.hpp"

namespace edtlab {

/// Closed-form moment generating functions of the waiting time T_w.
///
/// T_w is the delay before the first slot, plus a geometric number of
/// (wasted slot + waiting slot) pairs. All functions take s in the open
/// convergence region (-inf, s_max).
class WaitingMgf {
 public:
  WaitingMgf(const TrafficModel& model, const PacketSpec& packet, const SensingMode& mode,
             PuState state);

  /// Exclusive upper end of the convergence region.
  double s_max() const noexcept { return s_max_; }

  /// log E[e^{s T_w}]; +infinity at or beyond s_max.
  double log_value(double s) const noexcept;
  double value(double s) const noexcept;

  /// (1 - p) E[e^{s T_waste}], i.e. the transform of one failed slot.
  double failed_slot(double s) const noexcept;
  /// E[e^{s T_wait}] of one waiting slot, including missed detections.
  double wait_slot(double s) const noexcept;
  /// E[e^{s A}] of the delay before the first transmission slot.
  double first_slot(double s) const noexcept;

  /// Certificate for P(T_w > horizon).
  TailCertificate certificate(double horizon) const;

 private:
  double lambda_;
  double mu_;
  double t_tr_;
  double p_;
  double ts_;
  double beta_;
  double pe_;
  bool continuous_;
  bool imperfect_;
  PuState state_;
  double s_max_;
};

/// E[e^{s T_w}] by direct summation over the number of transmission slots,
/// truncated at relative tail 1e-12. Periodic and missed-detection waiting
/// transforms are themselves summed as series. Throws kDivergentSeries when a
/// term ratio reaches 1.
double mgf_waiting_series(const TrafficModel& model, const PacketSpec& packet,
                          const SensingMode& mode, PuState state, double s);

}  // namespace edtlab
