// sagplace: gateway / controller placement and the experiment bench.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "sagplace/errors.hpp"
#include "sagplace/experiment.hpp"
#include "sagplace/facility_oracle.hpp"
#include "sagplace/report.hpp"
#include "sagplace/solvers.hpp"

namespace fs = std::filesystem;
using namespace sagplace;

namespace {

enum Exit { kOk = 0, kFailure = 1, kInvalid = 2, kTooLarge = 3 };

struct CommonOptions {
  ObjectiveConfig cfg;
  std::uint64_t seed = 1;
  int failure_case = 1;
  double epsilon = 0.1;
  std::size_t restarts = 100;
  double speed = kFiberSpeedKmPerS;
  double sat_delay = kGeoHopDelayMs;
  std::string dump_tables;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--alpha", o.cfg.alpha, "gateway latency weight")->capture_default_str();
  cmd->add_option("--beta", o.cfg.beta, "synchronization weight")->capture_default_str();
  cmd->add_option("--psi", o.cfg.psi, "controller block weight in the joint cost")
      ->capture_default_str();
  cmd->add_option("--lcon", o.cfg.l_con, "per-node sync rate between controller pairs")
      ->capture_default_str();
  cmd->add_option("--gmax", o.cfg.g_max, "gateway budget")->capture_default_str();
  cmd->add_option("--kmax", o.cfg.k_max, "controller budget")->capture_default_str();
  cmd->add_option("--k-paths", o.cfg.k_paths, "reliability over the best of k shortest paths")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--epsilon", o.epsilon, "threshold greedy step")->capture_default_str();
  cmd->add_option("--restarts", o.restarts, "double greedy restarts")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "master seed")->capture_default_str();
  cmd->add_option("--case", o.failure_case, "failure probability case")
      ->capture_default_str()
      ->check(CLI::Range(1, 4));
  cmd->add_option("--signal-speed", o.speed, "fiber propagation speed, km/s")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--sat-delay", o.sat_delay, "gateway to satellite delay, ms")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--dump-tables", o.dump_tables,
                  "write latency and reliability tables as CSV under this directory");
}

GraphmlOptions graphml_options(const CommonOptions& o) { return {o.speed, o.sat_delay}; }

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InvalidInput(fmt::format("cannot write {}", path));
  out << text;
  if (!out) throw InvalidInput(fmt::format("write to {} failed", path));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// ---- place -----------------------------------------------------------------

struct PlaceOptions {
  std::string problem;
  std::string topo;
  std::string mode = "latency";
  std::string method = "approx";
  std::string out;
  std::string format = "csv";
  std::vector<NodeId> gateways;  // fixed stage-one gateways for `place controller`
};

nlohmann::json stage_json(const SolveResult& r) {
  return {{"open", r.open}, {"value", r.value}, {"evaluations", r.evaluations}};
}

int run_place(const PlaceOptions& po, const CommonOptions& co) {
  const Topology base = load_topology(po.topo, graphml_options(co));
  const Topology topo =
      sample_failures(base, FailureCase::builtin(co.failure_case), derive_seed(co.seed, 0));
  const PathTables tables = build_reliability_tables(topo, co.cfg.k_paths);
  co.cfg.validate(tables);
  if (!co.dump_tables.empty()) dump_tables_csv(topo, tables, co.dump_tables);

  const PlacementMode mode =
      po.mode == "reliability" ? PlacementMode::reliability : PlacementMode::latency_overhead;
  const SolveMethod method = po.method == "exact" ? SolveMethod::exact : SolveMethod::approx;
  const AssignRule rule =
      mode == PlacementMode::reliability ? AssignRule::reliability : AssignRule::latency;
  const SolverOptions solver{co.epsilon, co.restarts};
  const std::uint64_t seed = derive_seed(co.seed, 1);

  std::optional<GatewayPolicy> gw;
  std::optional<ControllerPolicy> ctl;
  nlohmann::json doc = {{"topology", topo.name},
                        {"nodes", topo.size()},
                        {"mode", po.mode},
                        {"method", po.method},
                        {"seed", co.seed},
                        {"case", co.failure_case}};

  if (po.problem == "joint") {
    const JointSolution s = solve_joint(topo, tables, co.cfg, mode, method, seed, solver);
    gw = s.gateways;
    ctl = s.controllers;
    doc["gateway_stage"] = stage_json(s.gateway_stage);
    doc["controller_stage"] = stage_json(s.controller_stage);
    doc["joint_utility"] = s.joint_utility;
    doc["joint_cost"] = s.joint_cost;
  } else if (po.problem == "gateway" || po.gateways.empty()) {
    auto [policy, run] = solve_gateways(tables, co.cfg, mode, method, derive_seed(seed, 0), solver);
    gw = std::move(policy);
    doc["gateway_stage"] = stage_json(run);
  } else {
    gw = make_gateway_policy(po.gateways, tables, rule);
  }
  if (po.problem == "controller") {
    auto [policy, run] =
        solve_controllers(*gw, tables, co.cfg, mode, method, derive_seed(seed, 1), solver);
    ctl = std::move(policy);
    doc["controller_stage"] = stage_json(run);
  }

  if (gw) {
    doc["gateways"] = gw->open;
    doc["gateway_cost"] = gateway_cost(gw->open, tables, co.cfg);
    doc["gateway_utility"] = gateway_utility(gw->open, tables);
  }
  if (ctl) {
    const ControllerCostTerms t = controller_cost_terms(ctl->open, *gw, tables, co.cfg);
    doc["controllers"] = ctl->open;
    doc["controller_cost"] = t.total;
    doc["controller_sync_cost"] = t.sync();
    doc["controller_utility"] = controller_utility(ctl->open, tables);
  }

  std::string text;
  if (po.format == "json") {
    nlohmann::json nodes = nlohmann::json::array();
    for (const Node& n : topo.nodes) {
      nlohmann::json row = {{"id", n.id}, {"name", n.name}};
      if (gw) {
        const NodeId j = gw->assign[n.id];
        row["gateway"] = j;
        row["gw_latency_ms"] = tables.latency(j, n.id);
        row["gw_reliability"] = tables.sat_reliability(j, n.id);
      }
      if (ctl) {
        const NodeId k = ctl->assign[n.id];
        row["controller"] = k;
        row["ctl_latency_ms"] = tables.latency(k, n.id);
        row["ctl_reliability"] = tables.ctl_reliability(k, n.id);
      }
      nodes.push_back(std::move(row));
    }
    doc["assignment"] = std::move(nodes);
    text = doc.dump(2) + "\n";
  } else {
    std::ostringstream out;
    out << "node,name,gateway,controller,gw_latency_ms,gw_reliability,ctl_latency_ms,"
           "ctl_reliability\n";
    for (const Node& n : topo.nodes) {
      out << n.id << ',' << csv_field(n.name) << ',';
      out << (gw ? std::to_string(gw->assign[n.id]) : "") << ',';
      out << (ctl ? std::to_string(ctl->assign[n.id]) : "") << ',';
      if (gw) {
        out << format_real(tables.latency(gw->assign[n.id], n.id)) << ','
            << format_real(tables.sat_reliability(gw->assign[n.id], n.id)) << ',';
      } else {
        out << ",,";
      }
      if (ctl) {
        out << format_real(tables.latency(ctl->assign[n.id], n.id)) << ','
            << format_real(tables.ctl_reliability(ctl->assign[n.id], n.id));
      } else {
        out << ',';
      }
      out << '\n';
    }
    text = out.str();
  }
  write_text(po.out, text);

  if (gw) fmt::print(stderr, "gateways: {}\n", fmt::join(gw->open, " "));
  if (ctl) fmt::print(stderr, "controllers: {}\n", fmt::join(ctl->open, " "));
  return kOk;
}

// ---- bench -----------------------------------------------------------------

struct BenchOptions {
  std::string exp = "A";
  std::vector<std::string> topologies{"Nsfnet"};
  std::size_t trials = 100;
  std::string sweep;
  std::string format = "csv";
  std::string out;
  bool verify = false;
  std::size_t jobs = 1;
  std::string exact = "auto";
  bool timing = false;
  std::vector<std::string> plots;
};

std::string sweep_tag(const ExperimentReport& rep, double value) {
  if (rep.sweep_key.empty()) return "";
  return fmt::format("_{}={}", rep.sweep_key, format_real(value));
}

int run_bench(const BenchOptions& bo, const CommonOptions& co) {
  ExperimentSpec spec;
  spec.experiment = parse_experiment(bo.exp);
  spec.topologies = bo.topologies;
  spec.failure_case = co.failure_case;
  spec.trials = bo.trials;
  spec.seed = co.seed;
  spec.cfg = co.cfg;
  spec.solver = {co.epsilon, co.restarts};
  if (!bo.sweep.empty()) spec.sweep = parse_sweep(bo.sweep);
  spec.exact = bo.exact == "on"    ? ExactBaseline::always
               : bo.exact == "off" ? ExactBaseline::never
                                   : ExactBaseline::automatic;
  spec.jobs = bo.jobs;
  spec.timing = bo.timing;
  spec.graphml = graphml_options(co);

  std::vector<Topology> topologies;
  for (const std::string& name : spec.topologies) {
    topologies.push_back(load_topology(name, spec.graphml));
  }
  if (!co.dump_tables.empty()) {
    for (const Topology& t : topologies) {
      const Topology sampled =
          sample_failures(t, FailureCase::builtin(spec.failure_case), derive_seed(spec.seed, 0));
      dump_tables_csv(sampled, build_reliability_tables(sampled, spec.cfg.k_paths),
                      fs::path(co.dump_tables) / t.name);
    }
  }

  const ExperimentReport report = run_experiment(spec, topologies);
  const std::string stem = fmt::format("exp_{}", bo.exp);

  if (bo.out.empty()) {
    if (bo.format == "json") {
      std::cout << report_json(report).dump(2) << '\n';
    } else {
      for (double v : report.sweep_values()) std::cout << report_csv(report.slice(v));
    }
  } else {
    const fs::path dir(bo.out);
    if (bo.format == "json") {
      emit_report(report, ReportFormat::json, dir / (stem + ".json"));
    } else {
      for (double v : report.sweep_values()) {
        emit_report(report.slice(v), ReportFormat::csv,
                    dir / (stem + sweep_tag(report, v) + ".csv"));
      }
    }
  }
  for (const std::string& figure : bo.plots) {
    const std::string csv = plot_csv(plot_data(report, figure));
    write_text(bo.out.empty() ? "-" : (fs::path(bo.out) / ("plot_" + figure + ".csv")).string(),
               csv);
  }

  if (bo.verify) {
    const auto issues = verify_report(spec, topologies, report);
    for (const auto& issue : issues) fmt::print(stderr, "verify: {}\n", issue);
    fmt::print(stderr, "verify: {} rows checked, {} mismatches\n", report.rows.size(),
               issues.size());
    if (!issues.empty()) return kFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Satellite gateway and SDN controller placement"};
  app.require_subcommand(1);

  CommonOptions place_common;
  PlaceOptions po;
  CLI::App* place = app.add_subcommand("place", "place gateways and/or controllers on one topology");
  place->add_option("problem", po.problem, "gateway, controller or joint")
      ->required()
      ->check(CLI::IsMember({"gateway", "controller", "joint"}));
  place->add_option("--topo", po.topo, "bundled topology name or GraphML/JSON path")->required();
  place->add_option("--mode", po.mode, "objective family")
      ->capture_default_str()
      ->check(CLI::IsMember({"latency", "overhead", "reliability"}));
  place->add_option("--method", po.method)
      ->capture_default_str()
      ->check(CLI::IsMember({"approx", "exact"}));
  place->add_option("--format", po.format)
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  place->add_option("--out", po.out, "output file (stdout when omitted)");
  place->add_option("--gateways", po.gateways,
                    "fixed gateway ids for `place controller` (solved first when omitted)")
      ->delimiter(',');
  add_common(place, place_common);

  CommonOptions bench_common;
  BenchOptions bo;
  CLI::App* bench = app.add_subcommand("bench", "run experiments A-D over sampled failures");
  bench->add_option("--exp", bo.exp, "A, B, C or D")->capture_default_str();
  bench->add_option("--topo", bo.topologies, "topology names or paths (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--trials", bo.trials)->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--sweep", bo.sweep, "key=v1,v2,... over alpha, beta, lcon, gmax, kmax, case");
  bench->add_option("--format", bo.format)
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("--out", bo.out, "output directory (stdout when omitted)");
  bench->add_flag("--verify", bo.verify, "recompute every row from its open set");
  bench->add_option("--jobs", bo.jobs, "worker threads")->capture_default_str()->check(
      CLI::PositiveNumber);
  bench->add_option("--exact", bo.exact, "exact baseline: auto, on or off")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "on", "off"}));
  bench->add_flag("--timing", bo.timing, "record solver wall times (output is then not reproducible)");
  bench->add_option("--plot", bo.plots,
                    "figure data: lat_gw, gw_tradeoff, rel_cases, rel_vs_budget, sync_tradeoff, "
                    "runtime");
  add_common(bench, bench_common);

  CLI::App* list = app.add_subcommand("topologies", "list bundled topologies");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*place) return run_place(po, place_common);
    if (*bench) return run_bench(bo, bench_common);
    if (*list) {
      for (const std::string& name : bundled_topologies()) {
        const Topology t = load_topology(name);
        fmt::print("{:<12}{:>4} nodes {:>4} links\n", name, t.size(), t.links.size());
      }
      return kOk;
    }
  } catch (const InstanceTooLarge& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kTooLarge;
  } catch (const InvalidInput& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kInvalid;
  } catch (const EmptyPolicy& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kInvalid;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kFailure;
  }
  return kOk;
}
