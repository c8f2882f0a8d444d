#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace edtlab {

struct ValidationOptions {
  std::uint64_t seed = 20240611;
  /// Largest admissible |total mass - 1| in the normalization check.
  double normalization_tolerance = 1e-6;
  /// Packets per EDT simulation.
  std::int64_t edt_samples = 1'000'000;
  /// EDT agreement checks repeat for seeds seed, seed + 1, ...
  int seed_count = 1;
  /// Counted packets per queue replication.
  std::int64_t queue_packets = 1'000'000;
  /// Pooled queue replications per configuration.
  int queue_seeds = 5;
  /// Check ids to run, 1 through 11; empty runs all.
  std::vector<int> only;
};

struct CheckResult {
  int id = 0;
  std::string title;
  bool passed = false;
  /// Observed statistics, `name=value` separated by "; ".
  std::string observed;
  /// The thresholds applied.
  std::string tolerance;
  double seconds = 0.0;
};

constexpr int kCheckCount = 11;

/// Runs the selected checks in id order. `on_result` sees each result as soon
/// as it is available. Throws kInvalidArgument for ids outside 1..kCheckCount.
std::vector<CheckResult> run_validation(
    const ValidationOptions& options,
    const std::function<void(const CheckResult&)>& on_result = {});

/// One report line: `PASS [3] title | observed | tolerance | seconds`.
std::string format_check(const CheckResult& result);

}  // namespace edtlab
