#pragma once

#include <cstddef>
#include <vector>

#include "edtlab/mixed_distribution.hpp"
#include "edtlab/primary_model.hpp"

namespace edtlab {

/// Cell layout shared by the on and off waiting-time solutions.
///
/// Breakpoints are all points nT_s + iT_tr up to the horizon (iT_tr only for
/// continuous sensing). The density is smooth between consecutive
/// breakpoints, and every breakpoint interval is subdivided into cells no
/// wider than max_cell_width.
struct PropagationMesh {
  std::vector<double> edges;
  /// Indices of cells that begin at a breakpoint.
  std::vector<std::size_t> piece_starts;
  /// Spacing of the commensurate lattice holding all breakpoints, or 0.
  double lattice = 0.0;
  double max_cell_width = 0.0;

  std::size_t cell_count() const noexcept { return edges.empty() ? 0 : edges.size() - 1; }
  double horizon() const noexcept { return edges.empty() ? 0.0 : edges.back(); }
};

/// Most breakpoints a mesh may hold before construction gives up.
inline constexpr std::size_t kMaxBreakpoints = 2'000'000;

/// Throws kOutOfRange when the breakpoint set would exceed kMaxBreakpoints
/// (typically an incommensurate T_tr / T_s over a long horizon).
PropagationMesh build_mesh(const TrafficModel& model, const PacketSpec& packet,
                           const SensingMode& mode, double horizon, double grid_resolution);

struct WaitingSolution {
  std::vector<Atom> atoms;
  PiecewiseDensity density;
};

/// Waiting-time law on the mesh, by forward propagation of the slot-start
/// renewal measure. The returned density and atoms are not tail-certified.
WaitingSolution propagate_waiting(const PropagationMesh& mesh, const TrafficModel& model,
                                  const PacketSpec& packet, const SensingMode& mode,
                                  PuState state);

}  // namespace edtlab
