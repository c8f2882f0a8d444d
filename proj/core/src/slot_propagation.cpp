#include "edtlab/slot_propagation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <variant>

#include "edtlab/chebyshev.hpp"
#include "edtlab/errors.hpp"

namespace edtlab {

namespace {

constexpr int kQ = CellBasis::kNodes;
constexpr int kG = CellBasis::kGauss;
using Matrix = std::array<std::array<double, kQ>, kQ>;

double place_tolerance(double x) { return 1e-9 * (1.0 + std::fabs(x)); }

// Best rational approximation num/den of r with den <= max_den that matches
// to 1e-12 relative, by continued-fraction convergents.
bool commensurate(double r, long long max_den, long long& num, long long& den) {
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double x = r;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(x);
    if (a > 1e15) return false;
    const long long ai = static_cast<long long>(a);
    const long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) return false;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::fabs(r - static_cast<double>(h1) / static_cast<double>(k1)) <=
        1e-12 * std::max(1.0, r)) {
      num = h1;
      den = k1;
      return true;
    }
    const double frac = x - a;
    if (frac <= 0.0) return false;
    x = 1.0 / frac;
  }
  return false;
}

std::vector<double> lattice_breakpoints(long long step_ts, long long step_t, double g,
                                        double horizon) {
  const long long count = static_cast<long long>(std::floor(horizon / g * (1.0 + 1e-12)));
  if (count + 1 > static_cast<long long>(kMaxBreakpoints)) {
    throw EdtError(ErrorCode::kOutOfRange, "breakpoint lattice exceeds the mesh size limit");
  }
  std::vector<char> reach(static_cast<std::size_t>(count) + 1, 0);
  std::vector<double> out;
  for (long long k = 0; k <= count; ++k) {
    const bool r = k == 0 || (k >= step_ts && reach[k - step_ts]) || (k >= step_t && reach[k - step_t]);
    reach[k] = r;
    if (r) out.push_back(static_cast<double>(k) * g);
  }
  return out;
}

std::vector<double> enumerated_breakpoints(double ts, double t, double horizon) {
  std::vector<double> out;
  for (long long n = 0;; ++n) {
    const double base = static_cast<double>(n) * ts;
    if (base > horizon) break;
    for (long long i = 0;; ++i) {
      const double x = base + static_cast<double>(i) * t;
      if (x > horizon) break;
      out.push_back(x);
      if (out.size() > 4 * kMaxBreakpoints) {
        throw EdtError(ErrorCode::kOutOfRange,
                       "breakpoint set exceeds the mesh size limit; T_tr and T_s are not "
                       "commensurate over this horizon");
      }
    }
  }
  std::sort(out.begin(), out.end());
  std::vector<double> merged;
  for (double x : out) {
    if (merged.empty() || x - merged.back() > place_tolerance(x)) merged.push_back(x);
  }
  if (merged.size() > kMaxBreakpoints) {
    throw EdtError(ErrorCode::kOutOfRange, "breakpoint set exceeds the mesh size limit");
  }
  return merged;
}

// Per-width integration operators. Times are local offsets tau from the cell
// start; node k sits at tau_k.
struct CellOps {
  std::array<double, kQ> decay{};  // e^{-tau_k/mu}
  Matrix conv{};                   // (1/mu) int_0^tau_k e^{-(tau_k-v)/mu} L_j(v) dv
  std::array<double, kQ> phi{};    // (1 - e^{-alpha tau_k}) / alpha
  Matrix p1{};                     // int_0^tau_k L_j(v) dv
  Matrix p2{};                     // int_0^tau_k phi(tau_k - v) L_j(v) dv
};

CellOps make_ops(double w, double mu, double alpha, bool continuous) {
  const CellBasis& basis = CellBasis::get();
  const auto& x = basis.nodes();
  const auto& xg = basis.gauss_nodes();
  const auto& wg = basis.gauss_weights();
  CellOps ops;
  for (int k = 0; k < kQ; ++k) {
    const double tau = 0.5 * w * (x[k] + 1.0);
    ops.decay[k] = std::exp(-tau / mu);
    ops.phi[k] = -std::expm1(-alpha * tau) / alpha;
    for (auto* m : {&ops.conv, &ops.p1, &ops.p2}) (*m)[k].fill(0.0);
    if (tau == 0.0) continue;
    for (int g = 0; g < kG; ++g) {
      const double v = 0.5 * tau * (xg[g] + 1.0);
      const double wt = 0.5 * tau * wg[g];
      const auto row = basis.lagrange_row(2.0 * v / w - 1.0);
      if (continuous) {
        const double ph = -std::expm1(-alpha * (tau - v)) / alpha;
        for (int j = 0; j < kQ; ++j) {
          ops.p1[k][j] += wt * row[j];
          ops.p2[k][j] += wt * ph * row[j];
        }
      } else {
        const double kern = std::exp(-(tau - v) / mu) / mu;
        for (int j = 0; j < kQ; ++j) ops.conv[k][j] += wt * kern * row[j];
      }
    }
  }
  return ops;
}

class OpsCache {
 public:
  OpsCache(double mu, double alpha, bool continuous) : mu_(mu), alpha_(alpha), continuous_(continuous) {}

  const CellOps& get(double w) {
    auto it = cache_.find(w);
    if (it != cache_.end()) return it->second;
    if (cache_.size() > 4096) cache_.clear();
    return cache_.emplace(w, make_ops(w, mu_, alpha_, continuous_)).first->second;
  }

 private:
  double mu_, alpha_;
  bool continuous_;
  std::map<double, CellOps> cache_;
};

enum class Side { kRight, kLeft, kAny };

// Monotone reader of already computed cell fields at x = t - shift.
class ShiftedReader {
 public:
  ShiftedReader(const std::vector<double>& edges, double shift) : edges_(edges), shift_(shift) {}

  // Returns false when x lies before time 0 (all fields vanish there).
  bool locate(double t, Side side, std::size_t limit, std::size_t& cell, CellBasis::Row& row) {
    const double x = t - shift_;
    const double tol = place_tolerance(x);
    if (x < -tol || (side == Side::kLeft && x <= tol)) return false;
    if (side == Side::kLeft) {
      while (cursor_ + 1 < limit && edges_[cursor_ + 1] < x - tol) ++cursor_;
    } else {
      while (cursor_ + 1 < limit && edges_[cursor_ + 1] <= x + tol) ++cursor_;
    }
    cell = cursor_;
    const double a = edges_[cell], b = edges_[cell + 1];
    double local = 2.0 * (x - a) / (b - a) - 1.0;
    if (side == Side::kRight && std::fabs(x - a) <= tol) local = -1.0;
    if (side == Side::kLeft && std::fabs(x - b) <= tol) local = 1.0;
    local = std::clamp(local, -1.0, 1.0);
    row = CellBasis::get().lagrange_row(local);
    return true;
  }

 private:
  const std::vector<double>& edges_;
  double shift_;
  std::size_t cursor_ = 0;
};

double dot(const CellBasis::Row& row, const double* v) {
  double s = 0.0;
  for (int j = 0; j < kQ; ++j) s += row[j] * v[j];
  return s;
}

Side node_side(int k) {
  if (k == 0) return Side::kRight;
  if (k == kQ - 1) return Side::kLeft;
  return Side::kAny;
}

// Atoms of the slot-start measure at multiples of T_s (or at 0).
std::vector<double> start_atoms(const TrafficModel& model, const SensingMode& mode, PuState state,
                                std::size_t count) {
  std::vector<double> mass(count, 0.0);
  if (count == 0) return mass;
  if (std::holds_alternative<ContinuousSensing>(mode)) {
    if (state == PuState::kOff) mass[0] = 1.0;
    return mass;
  }
  const double beta = busy_persistence_beta(model, sensing_interval(mode));
  const double pe = missed_detection(mode);
  if (state == PuState::kOff) {
    // Missed detections only: (1 - pe) pe^m at m T_s.
    double m = 1.0 - pe;
    for (std::size_t n = 0; n < count && m > 0.0; ++n) {
      mass[n] = m;
      m *= pe;
    }
    return mass;
  }
  // Lattice waiting slot, then missed detections: kappa_N = (1-pe) L_N + pe kappa_{N-1}.
  double lattice = 1.0 - beta, kappa = 0.0;
  for (std::size_t n = 1; n < count; ++n) {
    kappa = (1.0 - pe) * lattice + pe * kappa;
    mass[n] = kappa;
    lattice *= beta;
  }
  return mass;
}

std::size_t find_edge(const std::vector<double>& edges, double x) {
  auto it = std::lower_bound(edges.begin(), edges.end(), x - place_tolerance(x));
  if (it == edges.end() || std::fabs(*it - x) > place_tolerance(x)) {
    throw EdtError(ErrorCode::kInvalidArgument, "atom location is not a mesh breakpoint");
  }
  return static_cast<std::size_t>(it - edges.begin());
}

}  // namespace

PropagationMesh build_mesh(const TrafficModel& model, const PacketSpec& packet,
                           const SensingMode& mode, double horizon, double grid_resolution) {
  validate(mode);
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw EdtError(ErrorCode::kInvalidArgument, "mesh horizon must be positive and finite");
  }
  if (!(grid_resolution > 0.0)) {
    throw EdtError(ErrorCode::kInvalidArgument, "grid resolution must be > 0");
  }
  PropagationMesh mesh;
  mesh.max_cell_width = std::min((kQ - 1) / grid_resolution, 1.0 / model.alpha());

  const double t = packet.t_tr();
  std::vector<double> bp;
  if (std::holds_alternative<ContinuousSensing>(mode)) {
    const long long count = static_cast<long long>(std::floor(horizon / t * (1.0 + 1e-12)));
    if (count + 1 > static_cast<long long>(kMaxBreakpoints)) {
      throw EdtError(ErrorCode::kOutOfRange, "breakpoint set exceeds the mesh size limit");
    }
    for (long long i = 0; i <= count; ++i) bp.push_back(static_cast<double>(i) * t);
    mesh.lattice = t;
  } else {
    const double ts = sensing_interval(mode);
    long long num = 0, den = 0;
    const auto max_den = static_cast<long long>(kMaxBreakpoints * ts / horizon) + 1;
    if (commensurate(t / ts, max_den, num, den)) {
      const double g = ts / static_cast<double>(den);
      bp = lattice_breakpoints(den, num, g, horizon);
      mesh.lattice = g;
    } else {
      bp = enumerated_breakpoints(ts, t, horizon);
    }
  }
  if (horizon - bp.back() > place_tolerance(horizon)) {
    bp.push_back(horizon);
  } else {
    bp.back() = std::max(bp.back(), horizon);
  }

  mesh.edges.push_back(bp.front());
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    const double a = bp[k], b = bp[k + 1];
    const double len = b - a;
    const long long m = std::max<long long>(1, static_cast<long long>(std::ceil(len / mesh.max_cell_width - 1e-9)));
    const double w = len / static_cast<double>(m);
    mesh.piece_starts.push_back(mesh.edges.size() - 1);
    for (long long r = 1; r < m; ++r) mesh.edges.push_back(a + static_cast<double>(r) * w);
    mesh.edges.push_back(b);
  }
  return mesh;
}

WaitingSolution propagate_waiting(const PropagationMesh& mesh, const TrafficModel& model,
                                  const PacketSpec& packet, const SensingMode& mode,
                                  PuState state) {
  validate(mode);
  const std::size_t cells = mesh.cell_count();
  const auto& edges = mesh.edges;
  const CellBasis& basis = CellBasis::get();
  const auto& x = basis.nodes();
  const double lambda = model.lambda(), mu = model.mu(), alpha = model.alpha();
  const double t_tr = packet.t_tr();
  const double p = slot_success_probability(model, packet);
  const bool continuous = std::holds_alternative<ContinuousSensing>(mode);

  // Slot-start atoms, placed on mesh edges.
  std::vector<double> edge_atom(edges.size(), 0.0);
  std::vector<Atom> atoms;
  {
    const double ts = continuous ? 0.0 : sensing_interval(mode);
    const std::size_t count =
        continuous ? 1 : static_cast<std::size_t>(std::floor(mesh.horizon() / ts * (1.0 + 1e-12))) + 1;
    const std::vector<double> mass = start_atoms(model, mode, state, count);
    for (std::size_t n = 0; n < mass.size(); ++n) {
      if (mass[n] <= 0.0) continue;
      const std::size_t e = find_edge(edges, static_cast<double>(n) * ts);
      edge_atom[e] += mass[n];
      atoms.push_back({edges[e], p * mass[n]});
    }
  }

  OpsCache cache(mu, alpha, continuous);
  std::vector<double> g_field(cells * kQ, 0.0);
  std::vector<double> s_field(cells * kQ, 0.0);
  ShiftedReader by_t(edges, t_tr);

  if (continuous) {
    std::vector<double> j_field(cells * kQ, 0.0);
    double j_prev = state == PuState::kOn ? 1.0 / lambda : 0.0;
    double g_prev = 0.0;
    std::array<double, kQ> gd{};
    for (std::size_t c = 0; c < cells; ++c) {
      const double a = edges[c], b = edges[c + 1], w = b - a;
      const CellOps& ops = cache.get(w);
      const double ja = j_prev;
      const double ga = g_prev + edge_atom[c] / mu;
      for (int k = 0; k < kQ; ++k) {
        const double t = k == kQ - 1 ? b : a + 0.5 * w * (x[k] + 1.0);
        std::size_t cell = 0;
        CellBasis::Row row;
        gd[k] = by_t.locate(t, node_side(k), c, cell, row) ? p * dot(row, &g_field[cell * kQ]) : 0.0;
      }
      double* jc = &j_field[c * kQ];
      double* gc = &g_field[c * kQ];
      for (int k = 0; k < kQ; ++k) {
        double f1 = 0.0, f2 = 0.0;
        for (int j = 0; j < kQ; ++j) {
          f1 += (ops.p1[k][j] - ops.p2[k][j] / lambda) * gd[j];
          f2 += ops.p2[k][j] * gd[j];
        }
        const double ph = ops.phi[k];
        jc[k] = ja * (1.0 - ph / lambda) + ga * ph / lambda - f1 / lambda;
        gc[k] = ja * ph / mu + ga * (1.0 - ph / mu) - f2 / (lambda * mu);
      }
      j_prev = jc[kQ - 1];
      g_prev = gc[kQ - 1];
    }
    s_field.swap(j_field);
  } else {
    const double ts = sensing_interval(mode);
    const double beta = busy_persistence_beta(model, ts);
    const double pe = missed_detection(mode);
    std::vector<double> i_field(cells * kQ, 0.0);
    std::vector<double> y_field(cells * kQ, 0.0);
    ShiftedReader by_ts(edges, ts);
    double g_prev = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      const double a = edges[c], b = edges[c + 1], w = b - a;
      const CellOps& ops = cache.get(w);
      double* yc = &y_field[c * kQ];
      double* zc = &s_field[c * kQ];
      std::array<double, kQ> tk{};
      for (int k = 0; k < kQ; ++k) {
        tk[k] = k == kQ - 1 ? b : a + 0.5 * w * (x[k] + 1.0);
        std::size_t cell = 0;
        CellBasis::Row row;
        double i_back = 0.0, y_back = 0.0, z_back = 0.0;
        if (by_ts.locate(tk[k], node_side(k), c, cell, row)) {
          i_back = dot(row, &i_field[cell * kQ]);
          y_back = dot(row, &y_field[cell * kQ]);
          z_back = dot(row, &s_field[cell * kQ]);
        }
        yc[k] = (1.0 - beta) * i_back + beta * y_back;
        zc[k] = (1.0 - pe) * yc[k] + pe * z_back;
      }
      const double ga = g_prev + edge_atom[c] / mu;
      double* gc = &g_field[c * kQ];
      for (int k = 0; k < kQ; ++k) {
        double acc = ops.decay[k] * ga;
        for (int j = 0; j < kQ; ++j) acc += ops.conv[k][j] * zc[j];
        gc[k] = acc;
      }
      double* ic = &i_field[c * kQ];
      for (int k = 0; k < kQ; ++k) {
        std::size_t cell = 0;
        CellBasis::Row row;
        // The lookup may land in the current cell only at t - T_tr <= a.
        const double back = by_t.locate(tk[k], node_side(k), c + 1, cell, row)
                                ? dot(row, &g_field[cell * kQ])
                                : 0.0;
        ic[k] = gc[k] - p * back;
      }
      g_prev = gc[kQ - 1];
    }
  }

  for (double& v : s_field) v *= p;
  return {std::move(atoms), PiecewiseDensity(edges, std::move(s_field), mesh.piece_starts)};
}

}  // namespace edtlab
