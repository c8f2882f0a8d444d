// edt_lab: analytic EDT distributions, Monte Carlo checks, queue delay sweeps
// and the acceptance suite.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "edtlab/analytic_edt.hpp"
#include "edtlab/csv_io.hpp"
#include "edtlab/errors.hpp"
#include "edtlab/parallel.hpp"
#include "edtlab/queueing.hpp"
#include "edtlab/simulator.hpp"
#include "edtlab/validation.hpp"
#include "json.hpp"

namespace {

using edtlab::EdtError;
using edtlab::ErrorCode;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;

struct Options {
  double lambda = 3.0;
  double mu = 2.0;
  double ttr = 4.0;
  double ts = 0.5;
  double pe = 0.0;
  std::string mode = "continuous";
  std::string strategy = "nwp";
  std::string dist = "edt";
  std::string state = "stationary";
  std::optional<double> psi;
  std::int64_t samples = 100000;
  double horizon = 0.0;
  std::uint64_t seed = 1;
  std::optional<double> tolerance;
  double grid_res = 10.0;
  std::string out;
  int seeds = 5;
  std::int64_t packets = 100000;
  std::vector<double> psi_list;
  std::vector<double> load_factors{1.25, 1.5, 2.0, 3.0};
  std::vector<std::string> strategies{"nwp"};
  std::vector<double> pes;
  std::vector<int> only;
  int seed_count = 1;
};

edtlab::SensingMode sensing_mode(const Options& o) {
  if (o.mode == "continuous") return edtlab::ContinuousSensing{};
  if (o.mode == "periodic") {
    if (o.pe != 0.0) throw EdtError(ErrorCode::kConfigError, "--pe requires --mode imperfect");
    return edtlab::PeriodicPerfectSensing{o.ts};
  }
  return edtlab::PeriodicImperfectSensing{o.ts, o.pe};
}

edtlab::SensingMode with_pe(const Options& o, double pe) {
  if (pe == 0.0 && o.mode != "imperfect") return sensing_mode(o);
  return edtlab::PeriodicImperfectSensing{o.ts, pe};
}

edtlab::Strategy strategy_of(const std::string& s) {
  return s == "wp" ? edtlab::Strategy::kWorkPreserving : edtlab::Strategy::kNonWorkPreserving;
}

std::string fd(double x) { return edtlab::format_double(x); }

// Configuration keys that reproduce a run exactly.
edtlab::Metadata model_metadata(const Options& o) {
  edtlab::Metadata m{{"lambda", fd(o.lambda)}, {"mu", fd(o.mu)}, {"ttr", fd(o.ttr)},
                     {"mode", o.mode}};
  if (o.mode != "continuous") m.emplace_back("ts", fd(o.ts));
  if (o.mode == "imperfect") m.emplace_back("pe", fd(o.pe));
  return m;
}

void print_block(const json& j) { std::cout << j.dump(2) << '\n'; }

edtlab::EdtQuery make_query(const Options& o) {
  edtlab::EdtQuery q{edtlab::TrafficModel(o.lambda, o.mu), edtlab::PacketSpec(o.ttr),
                     sensing_mode(o)};
  q.horizon = o.horizon;
  q.tolerance = o.tolerance.value_or(1e-8);
  q.grid_resolution = o.grid_res;
  return q;
}

std::optional<edtlab::PuState> initial_state(const std::string& s) {
  if (s == "on") return edtlab::PuState::kOn;
  if (s == "off") return edtlab::PuState::kOff;
  return std::nullopt;
}

// Analytic law matching a simulated run: waiting time shifted by T_tr for a
// fixed initial state, the stationary EDT otherwise.
edtlab::MixedDistribution analytic_law(const edtlab::EdtQuery& q, const std::string& which) {
  if (which == "wait-on" || which == "on") {
    auto w = edtlab::waiting_distribution(q, edtlab::PuState::kOn);
    return which == "on" ? w.shifted(q.packet.t_tr()) : w;
  }
  if (which == "wait-off" || which == "off") {
    auto w = edtlab::waiting_distribution(q, edtlab::PuState::kOff);
    return which == "off" ? w.shifted(q.packet.t_tr()) : w;
  }
  return edtlab::edt_distribution(q);
}

int run_analytic(const Options& o) {
  const edtlab::EdtQuery q = make_query(o);
  const edtlab::MixedDistribution d = analytic_law(q, o.dist);
  const auto m1 = d.moment(1), m2 = d.moment(2);
  json j;
  j["distribution"] = o.dist;
  j["mode"] = edtlab::describe(q.mode);
  j["support_end"] = d.support_end() + (o.dist == "edt" ? q.packet.t_tr() : 0.0);
  j["tail_mass_bound"] = d.tail_mass_bound();
  j["total_mass"] = d.total_mass();
  j["atom_mass"] = d.atom_mass();
  j["mean"] = m1.value;
  j["mean_tail_bound"] = m1.uncertainty;
  j["second_moment"] = m2.value;
  j["second_moment_tail_bound"] = m2.uncertainty;
  if (!o.out.empty()) {
    const auto rows = edtlab::tabulate(d, o.grid_res);
    edtlab::write_distribution_csv(o.out, rows);
    edtlab::Metadata meta = model_metadata(o);
    meta.emplace_back("dist", o.dist);
    meta.emplace_back("horizon", fd(o.horizon));
    meta.emplace_back("tolerance", fd(q.tolerance));
    meta.emplace_back("grid-res", fd(o.grid_res));
    edtlab::write_metadata(o.out + ".meta", meta,
                           {"edt_lab analytic", "rows=" + std::to_string(rows.size()),
                            "table_mass=" + fd(edtlab::table_mass(rows)),
                            "support_end=" + fd(j["support_end"].get<double>()),
                            "tail_mass_bound=" + fd(d.tail_mass_bound())});
    j["csv"] = o.out;
    j["rows"] = rows.size();
  }
  print_block(j);
  return kExitOk;
}

int run_simulate(const Options& o) {
  const edtlab::EdtQuery q = make_query(o);
  edtlab::SimConfig c{q.model, q.packet, q.mode};
  c.strategy = strategy_of(o.strategy);
  c.seed = o.seed;
  c.n_samples = o.samples;
  c.initial_state = initial_state(o.state);
  const edtlab::SimResult r = edtlab::simulate_edt(c);
  json j;
  j["mode"] = edtlab::describe(q.mode);
  j["strategy"] = o.strategy;
  j["initial_state"] = o.state;
  j["samples"] = r.samples.size();
  j["seed"] = r.seed;
  j["mean"] = r.mean;
  j["second_moment"] = r.second_moment;
  j["standard_error"] = r.standard_error;
  if (c.strategy == edtlab::Strategy::kNonWorkPreserving) {
    const std::string which = o.state == "stationary" ? "edt" : o.state;
    j["ks_statistic"] = edtlab::ks_distance(analytic_law(q, which), r);
  } else {
    j["ks_statistic"] = nullptr;
  }
  if (!o.out.empty()) {
    edtlab::write_samples_csv(o.out, r.samples);
    edtlab::Metadata meta = model_metadata(o);
    meta.emplace_back("strategy", o.strategy);
    meta.emplace_back("state", o.state);
    meta.emplace_back("samples", std::to_string(o.samples));
    meta.emplace_back("seed", std::to_string(o.seed));
    edtlab::write_metadata(o.out + ".meta", meta, {"edt_lab simulate"});
    j["csv"] = o.out;
  }
  print_block(j);
  return kExitOk;
}

std::vector<std::uint64_t> seed_list(const Options& o) {
  std::vector<std::uint64_t> s;
  for (int i = 0; i < o.seeds; ++i) s.push_back(o.seed + static_cast<std::uint64_t>(i));
  return s;
}

edtlab::QueueRow queue_row(const Options& o, const edtlab::SensingMode& mode, double pe,
                           const std::string& strategy, double psi,
                           const edtlab::DelayResult& analytic) {
  edtlab::QueueRow row;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.analytic = analytic;
  if (strategy == "wp") {
    // The closed forms describe retransmission from scratch only.
    row.analytic.e1_t = row.analytic.e2_t = row.analytic.et2 = nan;
    row.analytic.mean_delay = row.analytic.mean_queue_length = nan;
  }
  row.strategy = strategy;
  row.pe = pe;
  row.sim_mean_sojourn = row.sim_sojourn_se = row.sim_queue_length = row.sim_queue_length_se = nan;
  if (o.packets > 0) {
    edtlab::SimConfig c{edtlab::TrafficModel(o.lambda, o.mu), edtlab::PacketSpec(o.ttr), mode};
    c.strategy = strategy_of(strategy);
    c.psi = psi;
    c.horizon = psi * static_cast<double>(o.packets) / 0.9;
    const auto seeds = seed_list(o);
    const edtlab::SimResult r = edtlab::simulate_queue_pooled(c, seeds);
    row.sim_mean_sojourn = r.mean;
    row.sim_sojourn_se = r.standard_error;
    row.sim_queue_length = r.mean_queue_length;
    row.sim_queue_length_se = r.queue_length_standard_error;
    row.sim_packets = static_cast<std::int64_t>(r.samples.size());
  }
  return row;
}

json row_json(const edtlab::QueueRow& r) {
  const auto num = [](double x) { return std::isfinite(x) ? json(x) : json(fd(x)); };
  json j;
  j["psi"] = r.analytic.psi;
  j["strategy"] = r.strategy;
  j["pe"] = r.pe;
  j["E1_t"] = num(r.analytic.e1_t);
  j["E2_t"] = num(r.analytic.e2_t);
  j["Et2"] = num(r.analytic.et2);
  j["E_D"] = num(r.analytic.mean_delay);
  j["E_NQ"] = num(r.analytic.mean_queue_length);
  j["stable"] = r.analytic.stable;
  j["sim_E_D"] = num(r.sim_mean_sojourn);
  j["sim_E_D_se"] = num(r.sim_sojourn_se);
  j["sim_E_NQ"] = num(r.sim_queue_length);
  j["sim_E_NQ_se"] = num(r.sim_queue_length_se);
  j["sim_packets"] = r.sim_packets;
  return j;
}

edtlab::Metadata queue_metadata(const Options& o) {
  edtlab::Metadata meta = model_metadata(o);
  meta.emplace_back("seed", std::to_string(o.seed));
  meta.emplace_back("seeds", std::to_string(o.seeds));
  meta.emplace_back("packets", std::to_string(o.packets));
  return meta;
}

int run_queue(const Options& o) {
  if (!o.psi) throw EdtError(ErrorCode::kConfigError, "queue requires --psi");
  const edtlab::SensingMode mode = sensing_mode(o);
  const edtlab::QueueConfig qc{edtlab::TrafficModel(o.lambda, o.mu), edtlab::PacketSpec(o.ttr),
                               mode, *o.psi};
  if (!(*o.psi > 0.0)) throw EdtError(ErrorCode::kConfigError, "--psi must be positive");
  const edtlab::QueueRow row =
      queue_row(o, mode, edtlab::missed_detection(mode), o.strategy, *o.psi, edtlab::mean_delay(qc));
  if (!o.out.empty()) {
    edtlab::write_queue_csv(o.out, {row});
    edtlab::Metadata meta = queue_metadata(o);
    meta.emplace_back("psi", fd(*o.psi));
    meta.emplace_back("strategy", o.strategy);
    edtlab::write_metadata(o.out + ".meta", meta, {"edt_lab queue"});
  }
  print_block(row_json(row));
  return kExitOk;
}

int run_sweep(const Options& o) {
  const edtlab::TrafficModel model(o.lambda, o.mu);
  const edtlab::PacketSpec packet(o.ttr);
  std::vector<double> pes = o.pes;
  if (pes.empty()) pes.push_back(o.mode == "imperfect" ? o.pe : 0.0);
  for (double pe : pes) {
    if (pe != 0.0 && o.mode == "continuous") {
      throw EdtError(ErrorCode::kConfigError, "--pes requires periodic sensing");
    }
  }
  std::vector<double> psis = o.psi_list;
  if (psis.empty()) {
    // Load factors are relative to the largest stability threshold swept.
    double threshold = 0.0;
    for (double pe : pes) {
      const auto sm = edtlab::service_moments_general(model, packet, with_pe(o, pe));
      threshold = std::max(threshold, sm.m1_off);
    }
    for (double f : o.load_factors) psis.push_back(f * threshold);
  }
  struct Point {
    double pe;
    double psi;
    edtlab::DelayResult analytic;
  };
  std::vector<Point> points;
  for (double pe : pes) {
    for (double psi : psis) {
      if (!(psi > 0.0)) throw EdtError(ErrorCode::kConfigError, "psi values must be positive");
      points.push_back({pe, psi, {}});
    }
  }
  edtlab::parallel_for(points.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      points[i].analytic =
          edtlab::mean_delay({model, packet, with_pe(o, points[i].pe), points[i].psi});
    }
  });
  std::vector<edtlab::QueueRow> rows;
  json all = json::array();
  for (const Point& p : points) {
    for (const std::string& s : o.strategies) {
      rows.push_back(queue_row(o, with_pe(o, p.pe), p.pe, s, p.psi, p.analytic));
      all.push_back(row_json(rows.back()));
    }
  }
  if (!o.out.empty()) {
    edtlab::write_queue_csv(o.out, rows);
    edtlab::write_metadata(o.out + ".meta", queue_metadata(o), {"edt_lab sweep"});
  }
  print_block(all);
  return kExitOk;
}

int run_validate(const Options& o) {
  edtlab::ValidationOptions v;
  v.seed = o.seed;
  if (o.tolerance) v.normalization_tolerance = *o.tolerance;
  v.only = o.only;
  v.seed_count = o.seed_count;
  bool all_pass = true;
  json report = json::array();
  edtlab::run_validation(v, [&](const edtlab::CheckResult& r) {
    std::cout << edtlab::format_check(r) << std::endl;
    all_pass = all_pass && r.passed;
    report.push_back({{"id", r.id},
                      {"title", r.title},
                      {"passed", r.passed},
                      {"observed", r.observed},
                      {"tolerance", r.tolerance},
                      {"seconds", r.seconds}});
  });
  if (!o.out.empty()) {
    std::ofstream out(o.out);
    out << report.dump(2) << '\n';
    if (!out) throw EdtError(ErrorCode::kIoFailure, "cannot write " + o.out);
  }
  return all_pass ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extended delivery time of secondary-user packets under interweave spectrum access"};
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
  app.allow_config_extras(false);
  app.require_subcommand(1);

  Options o;
  app.add_option("--lambda", o.lambda, "Mean PU on (busy) period")->capture_default_str();
  app.add_option("--mu", o.mu, "Mean PU off (idle) period")->capture_default_str();
  app.add_option("--ttr", o.ttr, "Packet transmission time")->capture_default_str();
  app.add_option("--ts", o.ts, "Sensing interval for periodic sensing")->capture_default_str();
  app.add_option("--pe", o.pe, "Missed-detection probability (imperfect sensing)")
      ->capture_default_str();
  app.add_option("--mode", o.mode, "Sensing mode")
      ->check(CLI::IsMember({"continuous", "periodic", "imperfect"}))
      ->capture_default_str();
  app.add_option("--strategy", o.strategy, "Retransmission strategy")
      ->check(CLI::IsMember({"nwp", "wp"}))
      ->capture_default_str();
  app.add_option("--dist", o.dist, "analytic: distribution to tabulate")
      ->check(CLI::IsMember({"edt", "wait-on", "wait-off"}))
      ->capture_default_str();
  app.add_option("--state", o.state, "simulate: PU state at packet availability")
      ->check(CLI::IsMember({"stationary", "on", "off"}))
      ->capture_default_str();
  app.add_option("--psi", o.psi, "queue: mean packet interarrival time");
  app.add_option("--samples", o.samples, "simulate: packets to simulate")->capture_default_str();
  app.add_option("--horizon", o.horizon, "analytic: EDT truncation horizon, 0 for automatic")
      ->capture_default_str();
  app.add_option("--seed", o.seed, "Base random seed")->capture_default_str();
  app.add_option("--tolerance", o.tolerance,
                 "analytic: tail mass tolerance (default 1e-8); validate: normalization tolerance "
                 "(default 1e-6)");
  app.add_option("--grid-res", o.grid_res, "Points per unit time")->capture_default_str();
  app.add_option("--out", o.out, "Output file; CSV outputs get a .meta sidecar");
  app.add_option("--seeds", o.seeds, "queue/sweep: pooled replications")->capture_default_str();
  app.add_option("--packets", o.packets,
                 "queue/sweep: counted packets per replication, 0 for analytic only")
      ->capture_default_str();
  app.add_option("--psi-list", o.psi_list, "sweep: explicit interarrival times")->delimiter(',');
  app.add_option("--load-factors", o.load_factors,
                 "sweep: interarrival times as multiples of the stability threshold")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--strategies", o.strategies, "sweep: strategies")
      ->delimiter(',')
      ->check(CLI::IsMember({"nwp", "wp"}))
      ->capture_default_str();
  app.add_option("--pes", o.pes, "sweep: missed-detection probabilities")->delimiter(',');
  app.add_option("--only", o.only, "validate: check ids to run")->delimiter(',');
  app.add_option("--seed-count", o.seed_count, "validate: seeds for the EDT agreement checks")
      ->capture_default_str();

  int (*handler)(const Options&) = nullptr;
  const auto sub = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    app.add_subcommand(name, help)->fallthrough()->callback([&handler, fn] { handler = fn; });
  };
  sub("analytic", "Tabulate an analytic distribution", run_analytic);
  sub("simulate", "Monte Carlo EDT samples with summary statistics", run_simulate);
  sub("queue", "Analytic and simulated queue delay at one arrival rate", run_queue);
  sub("sweep", "Queue delay over a range of arrival rates", run_sweep);
  sub("validate", "Run the acceptance checks", run_validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    return handler(o);
  } catch (const EdtError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
