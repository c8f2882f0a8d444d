#include "edtlab/mixed_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <boost/math/tools/minima.hpp>

#include "edtlab/errors.hpp"

namespace edtlab {

namespace {

constexpr int kQ = PiecewiseDensity::kNodes;

double to_local(double a, double b, double t) { return 2.0 * (t - a) / (b - a) - 1.0; }

bool same_place(double x, double y) {
  return std::fabs(x - y) <= MixedDistribution::kAtomMergeTolerance * (1.0 + std::fabs(x));
}

// Minimizes a convex function on [lo, hi] by Brent's method.
std::pair<double, double> convex_min(const std::function<double(double)>& f, double lo, double hi) {
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::brent_find_minima(f, lo, hi, 40, iters);
  return {r.first, r.second};
}

}  // namespace

PiecewiseDensity::PiecewiseDensity(std::vector<double> edges, std::vector<double> values,
                                   std::vector<std::size_t> piece_starts)
    : edges_(std::move(edges)), values_(std::move(values)), piece_starts_(std::move(piece_starts)) {
  if (edges_.size() == 1) edges_.clear();
  if (values_.size() != cell_count() * kQ) {
    throw EdtError(ErrorCode::kInvalidArgument, "density node count does not match cell count");
  }
  if (piece_starts_.empty() && cell_count() > 0) piece_starts_.push_back(0);
  build_prefix();
}

void PiecewiseDensity::build_prefix() {
  const auto& w = CellBasis::get().integral_weights();
  prefix_.assign(cell_count() + 1, 0.0);
  for (std::size_t c = 0; c < cell_count(); ++c) {
    const double* v = cell_values(c);
    double s = 0.0;
    for (int j = 0; j < kQ; ++j) s += w[j] * v[j];
    prefix_[c + 1] = prefix_[c] + 0.5 * (edges_[c + 1] - edges_[c]) * s;
  }
}

std::size_t PiecewiseDensity::locate(double t, bool right) const noexcept {
  // First edge strictly greater than t (right) or >= t (left).
  auto it = right ? std::upper_bound(edges_.begin(), edges_.end(), t)
                  : std::lower_bound(edges_.begin(), edges_.end(), t);
  std::size_t idx = static_cast<std::size_t>(it - edges_.begin());
  if (idx == 0) return 0;
  idx -= 1;
  return std::min(idx, cell_count() - 1);
}

double PiecewiseDensity::density(double t) const noexcept {
  if (cell_count() == 0 || t < start() || t >= end()) return 0.0;
  const std::size_t c = locate(t, true);
  return CellBasis::get().interpolate(cell_values(c), to_local(edges_[c], edges_[c + 1], t));
}

double PiecewiseDensity::density_left(double t) const noexcept {
  if (cell_count() == 0 || t <= start() || t > end()) return 0.0;
  const std::size_t c = locate(t, false);
  return CellBasis::get().interpolate(cell_values(c), to_local(edges_[c], edges_[c + 1], t));
}

double PiecewiseDensity::integral_to(double t) const noexcept {
  if (cell_count() == 0 || t <= start()) return 0.0;
  if (t >= end()) return total();
  const std::size_t c = locate(t, true);
  const double x = to_local(edges_[c], edges_[c + 1], t);
  return prefix_[c] +
         0.5 * (edges_[c + 1] - edges_[c]) * CellBasis::get().partial_integral(cell_values(c), x);
}

double PiecewiseDensity::min_node_value() const noexcept {
  if (values_.empty()) return 0.0;
  return *std::min_element(values_.begin(), values_.end());
}

double PiecewiseDensity::integrate(const std::function<double(double)>& weight) const {
  const CellBasis& basis = CellBasis::get();
  const auto& xg = basis.gauss_nodes();
  const auto& wg = basis.gauss_weights();
  double total = 0.0;
  for (std::size_t c = 0; c < cell_count(); ++c) {
    const double a = edges_[c], b = edges_[c + 1], half = 0.5 * (b - a);
    double s = 0.0;
    for (int g = 0; g < CellBasis::kGauss; ++g) {
      const double t = a + half * (xg[g] + 1.0);
      s += wg[g] * basis.interpolate(cell_values(c), xg[g]) * weight(t);
    }
    total += half * s;
  }
  return total;
}

double PiecewiseDensity::raw_moment(int k) const noexcept {
  const CellBasis& basis = CellBasis::get();
  const auto& xg = basis.gauss_nodes();
  const auto& wg = basis.gauss_weights();
  double total = 0.0, comp = 0.0;
  for (std::size_t c = 0; c < cell_count(); ++c) {
    const double a = edges_[c], b = edges_[c + 1], half = 0.5 * (b - a);
    double s = 0.0;
    for (int g = 0; g < CellBasis::kGauss; ++g) {
      const double t = a + half * (xg[g] + 1.0);
      s += wg[g] * basis.interpolate(cell_values(c), xg[g]) * std::pow(t, k);
    }
    const double term = half * s;
    const double y = total + term;
    comp += std::fabs(total) >= std::fabs(term) ? (total - y) + term : (term - y) + total;
    total = y;
  }
  return total + comp;
}

double PiecewiseDensity::laplace(double s) const noexcept {
  const CellBasis& basis = CellBasis::get();
  const auto& xg = basis.gauss_nodes();
  const auto& wg = basis.gauss_weights();
  double total = 0.0;
  for (std::size_t c = 0; c < cell_count(); ++c) {
    const double a = edges_[c], b = edges_[c + 1], half = 0.5 * (b - a);
    const double base = std::exp(s * a);
    if (base == 0.0) break;
    double acc = 0.0;
    for (int g = 0; g < CellBasis::kGauss; ++g) {
      const double dt = half * (xg[g] + 1.0);
      acc += wg[g] * basis.interpolate(cell_values(c), xg[g]) * std::exp(s * dt);
    }
    total += half * base * acc;
  }
  return total;
}

PiecewiseDensity PiecewiseDensity::shifted(double dt) const {
  PiecewiseDensity out = *this;
  for (double& e : out.edges_) e += dt;
  return out;
}

PiecewiseDensity PiecewiseDensity::scaled(double factor) const {
  PiecewiseDensity out = *this;
  for (double& v : out.values_) v *= factor;
  for (double& p : out.prefix_) p *= factor;
  return out;
}

PiecewiseDensity PiecewiseDensity::combine(const PiecewiseDensity& a, double wa,
                                           const PiecewiseDensity& b, double wb) {
  if (a.edges_ != b.edges_) {
    throw EdtError(ErrorCode::kInvalidArgument, "densities must share one cell layout");
  }
  std::vector<double> values(a.values_.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = wa * a.values_[i] + wb * b.values_[i];
  return PiecewiseDensity(a.edges_, std::move(values), a.piece_starts_);
}

double TailCertificate::bound(double x) const {
  if (!log_mgf || !(s_max > 0.0)) return 1.0;
  if (x <= 0.0) return 1.0;
  const double hi = s_max * (1.0 - 1e-9);
  auto f = [&](double s) { return log_mgf(s) - s * x; };
  const auto [s, v] = convex_min(f, 0.0, hi);
  (void)s;
  return std::min(1.0, std::exp(v));
}

double TailCertificate::moment_tail(int k) const {
  if (k <= 0) return bound(horizon);
  const double lo = k / horizon;
  const double hi = s_max * (1.0 - 1e-9);
  if (!log_mgf || !(lo < hi)) return std::numeric_limits<double>::infinity();
  // For t >= H and s >= k/H, t^k <= H^k e^{s(t-H)}.
  auto f = [&](double s) { return k * std::log(horizon) - s * horizon + log_mgf(s); };
  const auto [s, v] = convex_min(f, lo, hi);
  (void)s;
  return std::exp(v);
}

MixedDistribution::MixedDistribution(std::vector<Atom> atoms, PiecewiseDensity density,
                                     TailCertificate tail)
    : density_(std::move(density)), tail_(std::move(tail)) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return x.location < y.location; });
  for (const Atom& a : atoms) {
    if (!(a.mass >= 0.0) || !(a.location >= 0.0)) {
      throw EdtError(ErrorCode::kInvalidArgument, "atoms need location >= 0 and mass >= 0");
    }
    if (a.mass == 0.0) continue;
    if (!atoms_.empty() && same_place(atoms_.back().location, a.location)) {
      atoms_.back().mass += a.mass;
    } else {
      atoms_.push_back(a);
    }
  }
  atom_prefix_.assign(atoms_.size() + 1, 0.0);
  for (std::size_t i = 0; i < atoms_.size(); ++i) atom_prefix_[i + 1] = atom_prefix_[i] + atoms_[i].mass;
  tail_bound_ = tail_.bound(tail_.horizon);
}

double MixedDistribution::atom_mass() const noexcept {
  return atom_prefix_.empty() ? 0.0 : atom_prefix_.back();
}

double MixedDistribution::atom_at(double t) const noexcept {
  for (const Atom& a : atoms_) {
    if (same_place(a.location, t)) return a.mass;
    if (a.location > t) break;
  }
  return 0.0;
}

double MixedDistribution::cdf(double t) const noexcept {
  const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), t,
                                   [](double x, const Atom& a) { return x < a.location; });
  return atom_prefix_[static_cast<std::size_t>(it - atoms_.begin())] + density_.integral_to(t);
}

double MixedDistribution::cdf_left(double t) const noexcept {
  const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), t,
                                   [](const Atom& a, double x) { return a.location < x; });
  return atom_prefix_[static_cast<std::size_t>(it - atoms_.begin())] + density_.integral_to(t);
}

double MixedDistribution::laplace(double s) const noexcept {
  double total = 0.0;
  for (const Atom& a : atoms_) total += a.mass * std::exp(s * a.location);
  return total + density_.laplace(s);
}

MomentEstimate MixedDistribution::moment(int k) const {
  if (k < 0) throw EdtError(ErrorCode::kOutOfRange, "moment order must be >= 0");
  double v = 0.0;
  for (const Atom& a : atoms_) v += a.mass * std::pow(a.location, k);
  v += density_.raw_moment(k);
  return {v, tail_.moment_tail(k)};
}

double MixedDistribution::quantile(double u) const {
  if (!(u >= 0.0)) throw EdtError(ErrorCode::kOutOfRange, "quantile level must be >= 0");
  // Atoms first: the smallest atom location whose right-continuous cdf reaches u.
  double lo = 0.0, hi = support_end();
  for (const Atom& a : atoms_) {
    if (cdf_left(a.location) < u && cdf(a.location) >= u) return a.location;
  }
  if (cdf(hi) < u) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) >= u) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

MixedDistribution MixedDistribution::shifted(double dt) const {
  std::vector<Atom> atoms = atoms_;
  for (Atom& a : atoms) a.location += dt;
  TailCertificate tail = tail_;
  tail.horizon += dt;
  if (tail_.log_mgf) {
    auto inner = tail_.log_mgf;
    tail.log_mgf = [inner, dt](double s) { return inner(s) + s * dt; };
  }
  return MixedDistribution(std::move(atoms), density_.shifted(dt), std::move(tail));
}

MixedDistribution MixedDistribution::mixture(const MixedDistribution& a, double wa,
                                             const MixedDistribution& b, double wb) {
  std::vector<Atom> atoms;
  for (const Atom& x : a.atoms_) atoms.push_back({x.location, wa * x.mass});
  for (const Atom& x : b.atoms_) atoms.push_back({x.location, wb * x.mass});
  TailCertificate tail;
  tail.horizon = std::min(a.tail_.horizon, b.tail_.horizon);
  tail.s_max = std::min(a.tail_.s_max, b.tail_.s_max);
  if (a.tail_.log_mgf && b.tail_.log_mgf) {
    auto fa = a.tail_.log_mgf, fb = b.tail_.log_mgf;
    tail.log_mgf = [fa, fb, wa, wb](double s) {
      const double la = fa(s), lb = fb(s), m = std::max(la, lb);
      return m + std::log(wa * std::exp(la - m) + wb * std::exp(lb - m));
    };
  }
  return MixedDistribution(std::move(atoms), PiecewiseDensity::combine(a.density_, wa, b.density_, wb),
                           std::move(tail));
}

}  // namespace edtlab
