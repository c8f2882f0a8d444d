#pragma once

// Single-pole-power expansions used only to cross-check
// partial_fraction_expand. Not installed.

#include "edtlab/series_kernel.hpp"

namespace edtlab::detail {

/// 1/[x^k (x-a)]. Throws kOutOfRange for k < 1, kZeroPoleOffset for a == 0.
PartialFractionExpansion partial_fraction_power_at_zero(int k, double a);

/// 1/[x (x-a)^k]. Same errors.
PartialFractionExpansion partial_fraction_power_at_a(int k, double a);

}  // namespace edtlab::detail
