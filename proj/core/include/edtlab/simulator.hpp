#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "edtlab/mixed_distribution.hpp"
#include "edtlab/primary_model.hpp"
#include "edtlab/rng.hpp"

namespace edtlab {

enum class Strategy {
  /// An interrupted packet is retransmitted from scratch.
  kNonWorkPreserving,
  /// Transmission resumes where it was interrupted.
  kWorkPreserving,
};

const char* to_string(Strategy strategy) noexcept;

struct SimConfig {
  TrafficModel model;
  PacketSpec packet;
  SensingMode mode;
  Strategy strategy = Strategy::kNonWorkPreserving;
  std::uint64_t seed = 1;
  /// EDT mode: number of packets.
  std::int64_t n_samples = 100000;
  /// EDT mode: PU state at availability; empty draws it from the stationary law.
  std::optional<PuState> initial_state;
  /// Queue mode: mean interarrival time.
  double psi = 0.0;
  /// Queue mode: simulated time span.
  double horizon = 0.0;
  /// Queue mode: packets arriving before this time are discarded; a negative
  /// value selects 10% of the horizon.
  double warmup = -1.0;
  /// Queue mode: batches per replication for the batch-means standard error.
  int batches = 20;
};

/// Throws kInvalidArgument for n_samples < 1 (EDT mode) or for psi <= 0,
/// horizon <= warmup or batches < 2 (queue mode).
void validate(const SimConfig& config, bool queue_mode);

struct SimResult {
  /// Delivery times (EDT mode) or sojourn times (queue mode) in packet order.
  std::vector<double> samples;
  /// The samples sorted ascending: the jump points of the empirical CDF.
  std::vector<double> empirical_cdf;
  double mean = 0.0;
  double second_moment = 0.0;
  double standard_error = 0.0;
  std::uint64_t seed = 0;

  /// EDT mode: transmission slots used by each packet, successful one included.
  std::vector<std::int32_t> slots;

  /// Queue mode: time-average number of packets waiting (not in service).
  double mean_queue_length = 0.0;
  double queue_length_standard_error = 0.0;
  /// Queue mode: per-batch mean sojourn times and queue lengths.
  std::vector<double> batch_mean_sojourn;
  std::vector<double> batch_mean_queue;
  /// Queue mode: counted packets that found the system empty, and how many of
  /// those saw the PU on.
  std::int64_t type2_count = 0;
  std::int64_t type2_on_count = 0;

  /// Fraction of samples <= x.
  double ecdf(double x) const;
};

/// Lazily sampled PU on/off path. Queries must be nondecreasing in time.
class PuTimeline {
 public:
  PuTimeline(const TrafficModel& model, RandomStream rng,
             std::optional<PuState> initial = std::nullopt);

  /// Moves to the segment containing t; a segment end belongs to the next one.
  void advance(double t);
  bool on() const noexcept { return on_; }
  double segment_start() const noexcept { return start_; }
  double segment_end() const noexcept { return end_; }

 private:
  double lambda_;
  double mu_;
  RandomStream rng_;
  bool on_;
  double start_ = 0.0;
  double end_;
};

/// Runs one packet that becomes available at `start` and returns its
/// completion time. `slots`, when given, receives the number of
/// transmission slots used.
double serve_packet(PuTimeline& pu, RandomStream& detect, const SensingMode& mode,
                    Strategy strategy, double t_tr, double start, std::int32_t* slots = nullptr);

/// Independent packets, each with its own PU path and sensing draws keyed by
/// (seed, packet index). Paths do not depend on mode or strategy, so runs with
/// equal seeds share common random numbers.
SimResult simulate_edt(const SimConfig& config);

/// FIFO queue with Poisson arrivals on one shared PU path.
SimResult simulate_queue(const SimConfig& config);

/// simulate_queue for each seed concurrently, merged in seed order. The
/// standard errors come from the pooled batch means.
SimResult simulate_queue_pooled(const SimConfig& config, std::span<const std::uint64_t> seeds);

/// Sup over sample points and atoms of |F_analytic - F_empirical|, taking
/// both one-sided limits at each point. Samples within 1e-9 (1 + |x|) of an
/// analytic atom count as hitting it.
double ks_distance(const MixedDistribution& analytic, const SimResult& empirical);

/// Fraction of samples within 1e-9 (1 + |x|) of x, with its binomial
/// standard error.
struct PointMass {
  double mass;
  double standard_error;
};

PointMass empirical_point_mass(const SimResult& result, double x);

}  // namespace edtlab
