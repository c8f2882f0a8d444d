#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "edtlab/mixed_distribution.hpp"
#include "edtlab/queueing.hpp"

namespace edtlab {

struct DistributionRow {
  double t;
  double pdf;
  double cdf;
  double atom_mass;
};

/// Plot grid for a mixed distribution. Each smooth piece of the density
/// (pieces also split at atoms) gets an even number of equal steps no wider
/// than 1 / grid_resolution. Every piece boundary appears twice: first with
/// the left limits of pdf and cdf, then with the right limits and the atom
/// mass located there.
std::vector<DistributionRow> tabulate(const MixedDistribution& dist, double grid_resolution);

/// Atom masses plus composite Simpson integrals of the pdf column over each
/// piece, pieces being delimited by repeated t values.
double table_mass(const std::vector<DistributionRow>& rows);

/// Decimal text with 17 significant digits; "inf", "-inf" and "nan" for
/// non-finite values.
std::string format_double(double x);

/// Parses format_double output. Throws kIoFailure on malformed input.
double parse_double(const std::string& text);

/// Ordered key=value pairs of a metadata sidecar.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Writes `t,pdf,cdf,atom_mass` rows. Throws kIoFailure.
void write_distribution_csv(const std::string& path, const std::vector<DistributionRow>& rows);
std::vector<DistributionRow> read_distribution_csv(const std::string& path);

/// Writes one key=value line per entry, preceded by `#` comment lines.
/// The result is a valid --config file for the CLI.
void write_metadata(const std::string& path, const Metadata& meta,
                    const std::vector<std::string>& comments = {});
/// Reads key=value lines, skipping blanks and lines starting with # or ;.
std::map<std::string, std::string> read_metadata(const std::string& path);

/// Writes `sample_index,value` rows.
void write_samples_csv(const std::string& path, const std::vector<double>& samples);
std::vector<double> read_samples_csv(const std::string& path);

/// One row of the queue table. Simulation columns hold NaN when absent.
struct QueueRow {
  DelayResult analytic;
  std::string strategy = "nwp";
  double pe = 0.0;
  double sim_mean_sojourn = 0.0;
  double sim_sojourn_se = 0.0;
  double sim_queue_length = 0.0;
  double sim_queue_length_se = 0.0;
  std::int64_t sim_packets = 0;
};

/// Header `psi,E1_t,E2_t,Et2,E_D,E_NQ,stable` followed by strategy, pe and the
/// simulation columns.
void write_queue_csv(const std::string& path, const std::vector<QueueRow>& rows);
std::vector<QueueRow> read_queue_csv(const std::string& path);

}  // namespace edtlab
