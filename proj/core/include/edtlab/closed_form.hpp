#pragma once

#include "edtlab/primary_model.hpp"

namespace edtlab {

/// Pointwise hypergeometric and Erlang series for the continuous part of the
/// waiting-time density, summed over every term whose activation time is
/// <= t. Cost grows polynomially in t and the alternating sums lose accuracy
/// for large t; these evaluators serve as an independent check on short
/// horizons, not as the production path.
///
/// Continuous sensing uses the corrected forms: shifted exponentials
/// e^{-alpha(t - iT_tr)} in the off case and the sign pattern +,+,-,- in the
/// on case. Periodic on-case powers are (t - nT_s - iT_tr)^{i-1}.
double closed_form_density(const TrafficModel& model, const PacketSpec& packet,
                           const SensingMode& mode, PuState state, double t);

}  // namespace edtlab
