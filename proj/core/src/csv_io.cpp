#include "edtlab/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "edtlab/errors.hpp"

namespace edtlab {

namespace {

constexpr char kDistributionHeader[] = "t,pdf,cdf,atom_mass";
constexpr char kSamplesHeader[] = "sample_index,value";
constexpr char kQueueHeader[] =
    "psi,E1_t,E2_t,Et2,E_D,E_NQ,stable,strategy,pe,sim_E_D,sim_E_D_se,sim_E_NQ,sim_E_NQ_se,"
    "sim_packets";

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw EdtError(ErrorCode::kIoFailure, "cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EdtError(ErrorCode::kIoFailure, "cannot open " + path + " for reading");
  return in;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw EdtError(ErrorCode::kIoFailure, "write to " + path + " failed");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

// Reads a CSV with the expected header and a fixed column count.
std::vector<std::vector<std::string>> read_table(const std::string& path, const char* header,
                                                 std::size_t columns) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != header) {
    throw EdtError(ErrorCode::kIoFailure, path + ": unexpected header");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != columns) {
      throw EdtError(ErrorCode::kIoFailure, path + ": wrong column count in '" + line + "'");
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::vector<double> piece_boundaries(const MixedDistribution& dist) {
  const PiecewiseDensity& d = dist.density();
  std::vector<double> b;
  for (std::size_t c : d.piece_starts()) b.push_back(d.edges()[c]);
  b.push_back(d.end());
  for (const Atom& a : dist.atoms()) {
    if (a.location >= d.start() && a.location <= d.end()) b.push_back(a.location);
  }
  std::sort(b.begin(), b.end());
  std::vector<double> merged;
  for (double x : b) {
    if (merged.empty() ||
        x - merged.back() > MixedDistribution::kAtomMergeTolerance * (1.0 + std::fabs(x))) {
      merged.push_back(x);
    }
  }
  return merged;
}

}  // namespace

std::vector<DistributionRow> tabulate(const MixedDistribution& dist, double grid_resolution) {
  if (!(grid_resolution > 0.0) || !std::isfinite(grid_resolution)) {
    throw EdtError(ErrorCode::kInvalidArgument, "grid resolution must be positive");
  }
  std::vector<DistributionRow> rows;
  if (dist.density().cell_count() == 0) {
    for (const Atom& a : dist.atoms()) {
      rows.push_back({a.location, 0.0, dist.cdf_left(a.location), 0.0});
      rows.push_back({a.location, 0.0, dist.cdf(a.location), a.mass});
    }
    return rows;
  }
  const std::vector<double> b = piece_boundaries(dist);
  const auto boundary_rows = [&](double t) {
    rows.push_back({t, dist.density().density_left(t), dist.cdf_left(t), 0.0});
    rows.push_back({t, dist.pdf(t), dist.cdf(t), dist.atom_at(t)});
  };
  for (std::size_t p = 0; p + 1 < b.size(); ++p) {
    const double lo = b[p], hi = b[p + 1];
    boundary_rows(lo);
    auto steps = static_cast<std::int64_t>(std::ceil((hi - lo) * grid_resolution - 1e-9));
    steps = std::max<std::int64_t>(2, steps + (steps % 2));
    for (std::int64_t k = 1; k < steps; ++k) {
      const double t = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps);
      rows.push_back({t, dist.pdf(t), dist.cdf(t), 0.0});
    }
  }
  boundary_rows(b.back());
  return rows;
}

double table_mass(const std::vector<DistributionRow>& rows) {
  double atoms = 0.0;
  for (const auto& r : rows) atoms += r.atom_mass;
  double integral = 0.0;
  std::size_t i = 0;
  while (i < rows.size()) {
    // A piece runs from row i to the next row whose successor repeats its t.
    std::size_t j = i;
    while (j + 1 < rows.size() && rows[j + 1].t != rows[j].t) ++j;
    const std::size_t steps = j - i;
    if (steps >= 1) {
      std::size_t simpson = steps - (steps % 2);
      for (std::size_t k = 0; k < simpson; k += 2) {
        const auto& a = rows[i + k];
        const auto& m = rows[i + k + 1];
        const auto& c = rows[i + k + 2];
        integral += (c.t - a.t) / 6.0 * (a.pdf + 4.0 * m.pdf + c.pdf);
      }
      if (steps % 2 == 1) {
        const auto& a = rows[j - 1];
        const auto& c = rows[j];
        integral += 0.5 * (c.t - a.t) * (a.pdf + c.pdf);
      }
    }
    i = j + 1;
  }
  return atoms + integral;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(n));
}

double parse_double(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw EdtError(ErrorCode::kIoFailure, "malformed number '" + text + "'");
  }
  return v;
}

void write_distribution_csv(const std::string& path, const std::vector<DistributionRow>& rows) {
  std::ofstream out = open_out(path);
  out << kDistributionHeader << '\n';
  for (const auto& r : rows) {
    out << format_double(r.t) << ',' << format_double(r.pdf) << ',' << format_double(r.cdf) << ','
        << format_double(r.atom_mass) << '\n';
  }
  finish(out, path);
}

std::vector<DistributionRow> read_distribution_csv(const std::string& path) {
  std::vector<DistributionRow> rows;
  for (const auto& c : read_table(path, kDistributionHeader, 4)) {
    rows.push_back({parse_double(c[0]), parse_double(c[1]), parse_double(c[2]), parse_double(c[3])});
  }
  return rows;
}

void write_metadata(const std::string& path, const Metadata& meta,
                    const std::vector<std::string>& comments) {
  std::ofstream out = open_out(path);
  for (const auto& c : comments) out << "# " << c << '\n';
  for (const auto& [k, v] : meta) out << k << '=' << v << '\n';
  finish(out, path);
}

std::map<std::string, std::string> read_metadata(const std::string& path) {
  std::ifstream in = open_in(path);
  std::map<std::string, std::string> meta;
  std::string line;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw EdtError(ErrorCode::kIoFailure, path + ": expected key=value, got '" + line + "'");
    }
    meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return meta;
}

void write_samples_csv(const std::string& path, const std::vector<double>& samples) {
  std::ofstream out = open_out(path);
  out << kSamplesHeader << '\n';
  for (std::size_t i = 0; i < samples.size(); ++i) out << i << ',' << format_double(samples[i]) << '\n';
  finish(out, path);
}

std::vector<double> read_samples_csv(const std::string& path) {
  std::vector<double> v;
  for (const auto& c : read_table(path, kSamplesHeader, 2)) v.push_back(parse_double(c[1]));
  return v;
}

void write_queue_csv(const std::string& path, const std::vector<QueueRow>& rows) {
  std::ofstream out = open_out(path);
  out << kQueueHeader << '\n';
  for (const auto& r : rows) {
    const DelayResult& a = r.analytic;
    out << format_double(a.psi) << ',' << format_double(a.e1_t) << ',' << format_double(a.e2_t)
        << ',' << format_double(a.et2) << ',' << format_double(a.mean_delay) << ','
        << format_double(a.mean_queue_length) << ',' << (a.stable ? "true" : "false") << ','
        << r.strategy << ',' << format_double(r.pe) << ',' << format_double(r.sim_mean_sojourn)
        << ',' << format_double(r.sim_sojourn_se) << ',' << format_double(r.sim_queue_length)
        << ',' << format_double(r.sim_queue_length_se) << ',' << r.sim_packets << '\n';
  }
  finish(out, path);
}

std::vector<QueueRow> read_queue_csv(const std::string& path) {
  std::vector<QueueRow> rows;
  for (const auto& c : read_table(path, kQueueHeader, 14)) {
    QueueRow r;
    r.analytic.psi = parse_double(c[0]);
    r.analytic.e1_t = parse_double(c[1]);
    r.analytic.e2_t = parse_double(c[2]);
    r.analytic.et2 = parse_double(c[3]);
    r.analytic.mean_delay = parse_double(c[4]);
    r.analytic.mean_queue_length = parse_double(c[5]);
    if (c[6] != "true" && c[6] != "false") {
      throw EdtError(ErrorCode::kIoFailure, path + ": stable must be true or false");
    }
    r.analytic.stable = c[6] == "true";
    r.strategy = c[7];
    r.pe = parse_double(c[8]);
    r.sim_mean_sojourn = parse_double(c[9]);
    r.sim_sojourn_se = parse_double(c[10]);
    r.sim_queue_length = parse_double(c[11]);
    r.sim_queue_length_se = parse_double(c[12]);
    r.sim_packets = static_cast<std::int64_t>(parse_double(c[13]));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace edtlab
