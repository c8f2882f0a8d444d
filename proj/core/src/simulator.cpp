#include "edtlab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

#include "edtlab/errors.hpp"
#include "edtlab/parallel.hpp"

namespace edtlab {

namespace {

constexpr std::uint32_t kPurposePu = 1;
constexpr std::uint32_t kPurposeDetect = 2;
constexpr std::uint32_t kPurposeArrival = 3;
constexpr double kSnap = 1e-9;

double snap_width(double x) { return kSnap * (1.0 + std::fabs(x)); }

void summarize(SimResult& r) {
  const std::size_t n = r.samples.size();
  double s1 = 0.0, s2 = 0.0;
  for (double x : r.samples) {
    s1 += x;
    s2 += x * x;
  }
  r.mean = n ? s1 / n : 0.0;
  r.second_moment = n ? s2 / n : 0.0;
  const double var = n > 1 ? (s2 - n * r.mean * r.mean) / (n - 1) : 0.0;
  r.standard_error = n > 1 ? std::sqrt(std::max(var, 0.0) / n) : 0.0;
  r.empirical_cdf = r.samples;
  std::sort(r.empirical_cdf.begin(), r.empirical_cdf.end());
}

double mean_and_se(const std::vector<double>& v, double* se) {
  const std::size_t n = v.size();
  double s = 0.0;
  for (double x : v) s += x;
  const double m = n ? s / n : 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  *se = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  return m;
}

}  // namespace

const char* to_string(Strategy strategy) noexcept {
  return strategy == Strategy::kWorkPreserving ? "wp" : "nwp";
}

void validate(const SimConfig& config, bool queue_mode) {
  validate(config.mode);
  if (!queue_mode) {
    if (config.n_samples < 1) throw EdtError(ErrorCode::kInvalidArgument, "n_samples must be >= 1");
    return;
  }
  if (!(config.psi > 0.0) || !std::isfinite(config.psi)) {
    throw EdtError(ErrorCode::kInvalidArgument, "psi must be positive");
  }
  const double warmup = config.warmup < 0.0 ? 0.1 * config.horizon : config.warmup;
  if (!(config.horizon > warmup) || !std::isfinite(config.horizon)) {
    throw EdtError(ErrorCode::kInvalidArgument, "horizon must exceed warmup");
  }
  if (config.batches < 2) throw EdtError(ErrorCode::kInvalidArgument, "batches must be >= 2");
}

double SimResult::ecdf(double x) const {
  if (empirical_cdf.empty()) return 0.0;
  const auto it = std::upper_bound(empirical_cdf.begin(), empirical_cdf.end(), x);
  return static_cast<double>(it - empirical_cdf.begin()) / empirical_cdf.size();
}

PuTimeline::PuTimeline(const TrafficModel& model, RandomStream rng,
                       std::optional<PuState> initial)
    : lambda_(model.lambda()), mu_(model.mu()), rng_(rng) {
  const double u = rng_.uniform();
  on_ = initial ? *initial == PuState::kOn : u <= lambda_ / (lambda_ + mu_);
  end_ = rng_.exponential(on_ ? lambda_ : mu_);
}

void PuTimeline::advance(double t) {
  while (end_ <= t) {
    on_ = !on_;
    start_ = end_;
    end_ = start_ + rng_.exponential(on_ ? lambda_ : mu_);
  }
}

double serve_packet(PuTimeline& pu, RandomStream& detect, const SensingMode& mode,
                    Strategy strategy, double t_tr, double start, std::int32_t* slots) {
  const bool resume = strategy == Strategy::kWorkPreserving;
  double need = t_tr;
  std::int32_t k = 0;
  if (std::holds_alternative<ContinuousSensing>(mode)) {
    double t = start;
    for (;;) {
      pu.advance(t);
      if (pu.on()) {
        t = pu.segment_end();
        continue;
      }
      const double remaining = pu.segment_end() - t;
      ++k;
      if (remaining >= need) {
        if (slots) *slots = k;
        return t + need;
      }
      if (resume) need -= remaining;
      t = pu.segment_end();
    }
  }
  const double ts = sensing_interval(mode);
  const double pe = missed_detection(mode);
  // Sensing instants sit on a lattice anchored at availability and re-anchored
  // at every interruption.
  double anchor = start;
  std::int64_t j = 0;
  for (;;) {
    const double s = anchor + static_cast<double>(j) * ts;
    pu.advance(s);
    if (pu.on() || (pe > 0.0 && detect.uniform() <= pe)) {
      ++j;
      continue;
    }
    const double remaining = pu.segment_end() - s;
    ++k;
    if (remaining >= need) {
      if (slots) *slots = k;
      return s + need;
    }
    if (resume) need -= remaining;
    anchor = pu.segment_end();
    j = 1;
  }
}

SimResult simulate_edt(const SimConfig& config) {
  validate(config, false);
  const auto n = static_cast<std::size_t>(config.n_samples);
  SimResult r;
  r.seed = config.seed;
  r.samples.resize(n);
  r.slots.resize(n);
  const double t_tr = config.packet.t_tr();
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      PuTimeline pu(config.model, RandomStream(config.seed, i, kPurposePu), config.initial_state);
      RandomStream detect(config.seed, i, kPurposeDetect);
      r.samples[i] =
          serve_packet(pu, detect, config.mode, config.strategy, t_tr, 0.0, &r.slots[i]);
    }
  });
  summarize(r);
  return r;
}

SimResult simulate_queue(const SimConfig& config) {
  validate(config, true);
  const double horizon = config.horizon;
  const double warmup = config.warmup < 0.0 ? 0.1 * horizon : config.warmup;
  const int nb = config.batches;
  const double batch_len = (horizon - warmup) / nb;
  const double t_tr = config.packet.t_tr();

  PuTimeline pu(config.model, RandomStream(config.seed, 0, kPurposePu));
  RandomStream detect(config.seed, 0, kPurposeDetect);
  RandomStream arrivals(config.seed, 0, kPurposeArrival);

  SimResult r;
  r.seed = config.seed;
  std::vector<double> sojourn_sum(nb, 0.0), waiting_area(nb, 0.0);
  std::vector<std::int64_t> count(nb, 0);
  const auto batch_of = [&](double t) {
    return std::min(nb - 1, static_cast<int>((t - warmup) / batch_len));
  };

  double a = 0.0, free_at = 0.0;
  for (;;) {
    a += arrivals.exponential(config.psi);
    if (a >= horizon) break;
    const bool type2 = a >= free_at;
    const double begin = type2 ? a : free_at;
    bool on_at_arrival = false;
    if (type2) {
      pu.advance(a);
      on_at_arrival = pu.on();
    }
    free_at = serve_packet(pu, detect, config.mode, config.strategy, t_tr, begin);

    // Waiting interval [a, begin) clipped to the observation window.
    const double lo = std::max(a, warmup), hi = std::min(begin, horizon);
    if (lo < hi) {
      for (int b = batch_of(lo), last = batch_of(hi); b <= last; ++b) {
        const double b_lo = std::max(lo, warmup + b * batch_len);
        const double b_hi = b == last ? hi : std::min(hi, warmup + (b + 1) * batch_len);
        if (b_hi > b_lo) waiting_area[b] += b_hi - b_lo;
      }
    }
    if (a < warmup) continue;
    const double d = free_at - a;
    r.samples.push_back(d);
    const int b = batch_of(a);
    sojourn_sum[b] += d;
    ++count[b];
    if (type2) {
      ++r.type2_count;
      if (on_at_arrival) ++r.type2_on_count;
    }
  }

  summarize(r);
  for (int b = 0; b < nb; ++b) {
    r.batch_mean_sojourn.push_back(count[b] ? sojourn_sum[b] / count[b] : 0.0);
    r.batch_mean_queue.push_back(waiting_area[b] / batch_len);
  }
  double se = 0.0;
  mean_and_se(r.batch_mean_sojourn, &se);
  r.standard_error = se;
  r.mean_queue_length = mean_and_se(r.batch_mean_queue, &r.queue_length_standard_error);
  return r;
}

SimResult simulate_queue_pooled(const SimConfig& config, std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw EdtError(ErrorCode::kInvalidArgument, "at least one seed is required");
  validate(config, true);
  std::vector<SimResult> runs(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      SimConfig c = config;
      c.seed = seeds[i];
      runs[i] = simulate_queue(c);
    }
  });
  SimResult r;
  r.seed = seeds.front();
  for (auto& run : runs) {
    r.samples.insert(r.samples.end(), run.samples.begin(), run.samples.end());
    r.batch_mean_sojourn.insert(r.batch_mean_sojourn.end(), run.batch_mean_sojourn.begin(),
                                run.batch_mean_sojourn.end());
    r.batch_mean_queue.insert(r.batch_mean_queue.end(), run.batch_mean_queue.begin(),
                              run.batch_mean_queue.end());
    r.type2_count += run.type2_count;
    r.type2_on_count += run.type2_on_count;
  }
  summarize(r);
  double se = 0.0;
  mean_and_se(r.batch_mean_sojourn, &se);
  r.standard_error = se;
  r.mean_queue_length = mean_and_se(r.batch_mean_queue, &r.queue_length_standard_error);
  return r;
}

double ks_distance(const MixedDistribution& analytic, const SimResult& empirical) {
  std::vector<double> x = empirical.empirical_cdf;
  const std::size_t n = x.size();
  if (n == 0) throw EdtError(ErrorCode::kInvalidArgument, "empirical sample is empty");
  const auto& atoms = analytic.atoms();
  for (const Atom& atom : atoms) {
    const double w = snap_width(atom.location);
    auto lo = std::lower_bound(x.begin(), x.end(), atom.location - w);
    for (; lo != x.end() && *lo <= atom.location + w; ++lo) *lo = atom.location;
  }
  std::sort(x.begin(), x.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && x[j] == x[i]) ++j;
    const double below = static_cast<double>(i) / n, upto = static_cast<double>(j) / n;
    d = std::max(d, std::fabs(analytic.cdf_left(x[i]) - below));
    d = std::max(d, std::fabs(analytic.cdf(x[i]) - upto));
    i = j;
  }
  for (const Atom& atom : atoms) {
    const auto lo = std::lower_bound(x.begin(), x.end(), atom.location);
    const auto hi = std::upper_bound(x.begin(), x.end(), atom.location);
    d = std::max(d, std::fabs(analytic.cdf_left(atom.location) -
                              static_cast<double>(lo - x.begin()) / n));
    d = std::max(d, std::fabs(analytic.cdf(atom.location) -
                              static_cast<double>(hi - x.begin()) / n));
  }
  return d;
}

PointMass empirical_point_mass(const SimResult& result, double x) {
  const auto& v = result.empirical_cdf;
  if (v.empty()) return {0.0, 0.0};
  const double w = snap_width(x);
  const auto lo = std::lower_bound(v.begin(), v.end(), x - w);
  const auto hi = std::upper_bound(v.begin(), v.end(), x + w);
  const double n = static_cast<double>(v.size());
  const double p = static_cast<double>(hi - lo) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace edtlab
