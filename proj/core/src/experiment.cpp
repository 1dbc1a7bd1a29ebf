#include "sagplace/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "sagplace/errors.hpp"
#include "sagplace/facility_oracle.hpp"

namespace sagplace {

namespace {

const std::vector<std::string> kSweepKeys = {"alpha", "beta", "lcon", "gmax", "kmax", "case"};

bool integral_key(const std::string& key) {
  return key == "gmax" || key == "kmax" || key == "case";
}

double parse_number(const std::string& text, const std::string& key) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw InvalidInput(fmt::format("sweep {}: '{}' is not a number", key, text));
  }
  return v;
}

// Config and failure case of one sweep point.
struct Point {
  ObjectiveConfig cfg;
  int failure_case = 1;
  double value = 0.0;
};

Point apply_sweep(const ExperimentSpec& spec, double value) {
  Point p{spec.cfg, spec.failure_case, value};
  if (!spec.sweep) return p;
  const std::string& key = spec.sweep->key;
  if (key == "alpha") p.cfg.alpha = value;
  else if (key == "beta") p.cfg.beta = value;
  else if (key == "lcon") p.cfg.l_con = value;
  else if (key == "gmax") p.cfg.g_max = static_cast<std::size_t>(value);
  else if (key == "kmax") p.cfg.k_max = static_cast<std::size_t>(value);
  else if (key == "case") p.failure_case = static_cast<int>(value);
  return p;
}

std::vector<Point> sweep_points(const ExperimentSpec& spec) {
  if (!spec.sweep) return {apply_sweep(spec, 0.0)};
  std::vector<Point> out;
  for (double v : spec.sweep->values) out.push_back(apply_sweep(spec, v));
  return out;
}

bool reliability_experiment(Experiment e) { return e == Experiment::B || e == Experiment::D; }
bool gateway_experiment(Experiment e) { return e == Experiment::A || e == Experiment::B; }

std::optional<std::size_t> stage_budget(Experiment e, const ObjectiveConfig& cfg) {
  if (e == Experiment::B) return cfg.g_max;
  if (e == Experiment::D) return cfg.k_max;
  return std::nullopt;
}

bool auto_exact(std::size_t n, std::optional<std::size_t> budget) {
  if (!budget) return n <= kAutoExactUnbudgeted;
  return enumeration_allowed(n, budget);
}

bool exact_wanted(ExactBaseline baseline, std::size_t n, std::optional<std::size_t> budget) {
  switch (baseline) {
    case ExactBaseline::never: return false;
    case ExactBaseline::always: return true;
    case ExactBaseline::automatic: return auto_exact(n, budget);
  }
  return false;
}

// Everything a trial needs before the solvers run.
struct Instance {
  Topology topo;
  PathTables tables;
  GatewayPolicy gw;  // stage-one gateways, controller experiments only
};

// The gateway stage feeding Exp C and D is shared by both methods so that
// approx and exact solve the same controller problem. It is solved exactly
// whenever the automatic guard allows it.
GatewayPolicy fixed_gateways(const ExperimentSpec& spec, const Point& p, const PathTables& tables,
                             std::uint64_t trial_seed) {
  const bool reliability = spec.experiment == Experiment::D;
  const auto mode = reliability ? PlacementMode::reliability : PlacementMode::latency_overhead;
  const std::optional<std::size_t> budget =
      reliability ? std::optional<std::size_t>(p.cfg.g_max) : std::nullopt;
  const bool exact = spec.exact != ExactBaseline::never && auto_exact(tables.gateways.size(), budget);
  return solve_gateways(tables, p.cfg, mode, exact ? SolveMethod::exact : SolveMethod::approx,
                        derive_seed(trial_seed, 0), spec.solver)
      .first;
}

Instance make_instance(const ExperimentSpec& spec, const Point& p, const Topology& base,
                       std::size_t trial) {
  const std::uint64_t trial_seed = derive_seed(spec.seed, trial);
  Instance in;
  in.topo = sample_failures(base, FailureCase::builtin(p.failure_case), trial_seed);
  in.tables = build_reliability_tables(in.topo, p.cfg.k_paths);
  p.cfg.validate(in.tables);
  if (!gateway_experiment(spec.experiment)) in.gw = fixed_gateways(spec, p, in.tables, trial_seed);
  return in;
}

// Objective, latency, reliability and facility count of a chosen open set.
void fill_metrics(Experiment e, const Instance& in, const ObjectiveConfig& cfg,
                  const std::vector<NodeId>& open, TrialRow& row) {
  const AssignRule rule = reliability_experiment(e) ? AssignRule::reliability : AssignRule::latency;
  row.open = open;
  row.facilities = open.size();
  if (gateway_experiment(e)) {
    const GatewayPolicy pol = make_gateway_policy(open, in.tables, rule);
    row.objective = e == Experiment::A ? gateway_cost(open, in.tables, cfg)
                                       : gateway_utility(open, in.tables);
    row.avg_latency_ms = average_latency(pol, in.tables);
    row.avg_reliability = average_reliability(pol, in.tables);
    return;
  }
  const ControllerPolicy pol = make_controller_policy(open, in.tables, rule);
  row.avg_latency_ms = average_latency(pol, in.tables);
  row.avg_reliability = average_reliability(pol, in.tables);
  if (e == Experiment::C) {
    const ControllerCostTerms terms = controller_cost_terms(open, in.gw, in.tables, cfg);
    row.objective = terms.total;
    row.sync_cost = terms.sync();
  } else {
    row.objective = controller_utility(open, in.tables);
  }
}

SolveResult solve_stage(const ExperimentSpec& spec, const Instance& in, const ObjectiveConfig& cfg,
                        SolveMethod method, std::uint64_t trial_seed) {
  const auto mode = reliability_experiment(spec.experiment) ? PlacementMode::reliability
                                                            : PlacementMode::latency_overhead;
  if (gateway_experiment(spec.experiment)) {
    return solve_gateways(in.tables, cfg, mode, method, derive_seed(trial_seed, 0), spec.solver)
        .second;
  }
  return solve_controllers(in.gw, in.tables, cfg, mode, method, derive_seed(trial_seed, 1),
                           spec.solver)
      .second;
}

std::vector<TrialRow> run_job(const ExperimentSpec& spec, const Point& p, const Topology& base,
                              std::size_t trial) {
  const Instance in = make_instance(spec, p, base, trial);
  const std::uint64_t trial_seed = derive_seed(spec.seed, trial);
  const std::size_t n = gateway_experiment(spec.experiment) ? in.tables.gateways.size()
                                                            : in.tables.controllers.size();

  TrialRow proto;
  proto.topology = base.name;
  proto.nodes = base.size();
  proto.trial = trial;
  proto.sweep_key = spec.sweep ? spec.sweep->key : std::string{};
  proto.sweep_value = p.value;
  proto.failure_case = p.failure_case;

  const SolveResult approx = solve_stage(spec, in, p.cfg, SolveMethod::approx, trial_seed);
  std::vector<TrialRow> rows(1, proto);
  rows[0].method = "approx";
  fill_metrics(spec.experiment, in, p.cfg, approx.open, rows[0]);
  if (spec.timing) rows[0].time_ms = approx.wall_time_ms;

  if (exact_wanted(spec.exact, n, stage_budget(spec.experiment, p.cfg))) {
    const SolveResult exact = solve_stage(spec, in, p.cfg, SolveMethod::exact, trial_seed);
    TrialRow row = proto;
    row.method = "exact";
    fill_metrics(spec.experiment, in, p.cfg, exact.open, row);
    if (spec.timing) row.time_ms = exact.wall_time_ms;
    if (exact.value > 0.0) rows[0].approx_ratio = approx.value / exact.value;
    rows.push_back(std::move(row));
  }
  return rows;
}

void check_spec(const ExperimentSpec& spec, const std::vector<Topology>& topologies) {
  if (topologies.empty()) throw InvalidInput("no topologies given");
  if (spec.trials == 0) throw InvalidInput("trials must be at least 1");
  if (spec.jobs == 0) throw InvalidInput("jobs must be at least 1");
  FailureCase::builtin(spec.failure_case);
  if (spec.sweep && spec.sweep->values.empty()) throw InvalidInput("sweep has no values");
}

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-7 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

Experiment parse_experiment(const std::string& s) {
  if (s.size() == 1) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    if (c >= 'A' && c <= 'D') return static_cast<Experiment>(c);
  }
  throw InvalidInput(fmt::format("unknown experiment '{}' (expected A, B, C or D)", s));
}

Sweep parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw InvalidInput(fmt::format("sweep '{}' is not of the form key=v1,v2,...", text));
  }
  Sweep sweep;
  sweep.key = text.substr(0, eq);
  if (std::find(kSweepKeys.begin(), kSweepKeys.end(), sweep.key) == kSweepKeys.end()) {
    throw InvalidInput(fmt::format("unknown sweep key '{}' (expected one of {})", sweep.key,
                                   fmt::join(kSweepKeys, ", ")));
  }
  std::string rest = text.substr(eq + 1);
  std::size_t start = 0;
  while (start <= rest.size()) {
    const auto comma = rest.find(',', start);
    const std::string item =
        rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const double v = parse_number(item, sweep.key);
    if (!std::isfinite(v) || v <= 0.0) {
      throw InvalidInput(fmt::format("sweep {}: values must be finite and positive, got {}",
                                     sweep.key, item));
    }
    if (integral_key(sweep.key) && v != std::floor(v)) {
      throw InvalidInput(fmt::format("sweep {}: values must be integers, got {}", sweep.key, item));
    }
    if (sweep.key == "case" && v > 4) {
      throw InvalidInput(fmt::format("sweep case: failure cases are 1..4, got {}", item));
    }
    sweep.values.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return sweep;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  std::vector<Topology> topologies;
  for (const std::string& name : spec.topologies) topologies.push_back(load_topology(name, spec.graphml));
  return run_experiment(spec, topologies);
}

ExperimentReport run_experiment(const ExperimentSpec& spec,
                                const std::vector<Topology>& topologies) {
  check_spec(spec, topologies);
  const std::vector<Point> points = sweep_points(spec);

  struct Job {
    const Point* point;
    const Topology* topo;
    std::size_t trial;
  };
  std::vector<Job> jobs;
  for (const Point& p : points) {
    for (const Topology& t : topologies) {
      for (std::size_t trial = 0; trial < spec.trials; ++trial) jobs.push_back({&p, &t, trial});
    }
  }

  std::vector<std::vector<TrialRow>> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = run_job(spec, *jobs[i].point, *jobs[i].topo, jobs[i].trial);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(spec.jobs, jobs.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentReport report;
  report.experiment = static_cast<char>(spec.experiment);
  report.sweep_key = spec.sweep ? spec.sweep->key : std::string{};
  for (auto& rows : results) {
    for (auto& r : rows) report.rows.push_back(std::move(r));
  }
  report.aggregates = aggregate(report.rows);
  return report;
}

std::vector<std::string> verify_report(const ExperimentSpec& spec,
                                       const std::vector<Topology>& topologies,
                                       const ExperimentReport& report) {
  std::vector<std::string> issues;
  if (report.experiment != static_cast<char>(spec.experiment)) {
    issues.push_back(fmt::format("report is experiment {}, spec asks for {}", report.experiment,
                                 static_cast<char>(spec.experiment)));
    return issues;
  }

  // Rows of one (topology, trial, sweep point) share an instance.
  std::optional<Instance> cached;
  std::string cached_key;
  for (const TrialRow& row : report.rows) {
    const auto topo = std::find_if(topologies.begin(), topologies.end(),
                                   [&](const Topology& t) { return t.name == row.topology; });
    const std::string where =
        fmt::format("{} trial {} {}{}", row.topology, row.trial, row.method,
                    row.sweep_key.empty() ? std::string{}
                                          : fmt::format(" {}={}", row.sweep_key,
                                                        format_real(row.sweep_value)));
    if (topo == topologies.end()) {
      issues.push_back(fmt::format("{}: unknown topology", where));
      continue;
    }
    const Point p = apply_sweep(spec, row.sweep_value);
    const std::string key =
        fmt::format("{}/{}/{}", row.topology, row.trial, format_real(row.sweep_value));
    try {
      if (!cached || key != cached_key) {
        cached = make_instance(spec, p, *topo, row.trial);
        cached_key = key;
      }
      TrialRow again = row;
      fill_metrics(spec.experiment, *cached, p.cfg, row.open, again);
      auto check = [&](const char* what, double stored, double recomputed) {
        if (!close(stored, recomputed)) {
          issues.push_back(fmt::format("{}: {} is {} but recomputes to {}", where, what,
                                       format_real(stored), format_real(recomputed)));
        }
      };
      check("objective", row.objective, again.objective);
      check("avg_latency_ms", row.avg_latency_ms, again.avg_latency_ms);
      check("avg_reliability", row.avg_reliability, again.avg_reliability);
      if (row.facilities != again.facilities) {
        issues.push_back(fmt::format("{}: facilities is {} but the open set has {}", where,
                                     row.facilities, again.facilities));
      }
      if (row.sync_cost && again.sync_cost) check("sync_cost", *row.sync_cost, *again.sync_cost);
    } catch (const std::exception& e) {
      issues.push_back(fmt::format("{}: {}", where, e.what()));
    }
  }

  const std::vector<AggregateRow> again = aggregate(report.rows);
  if (again.size() != report.aggregates.size()) {
    issues.push_back(fmt::format("{} aggregate rows, rows imply {}", report.aggregates.size(),
                                 again.size()));
  } else {
    for (std::size_t i = 0; i < again.size(); ++i) {
      const AggregateRow& a = report.aggregates[i];
      const AggregateRow& b = again[i];
      if (a.trials != b.trials || !close(a.objective.mean, b.objective.mean) ||
          !close(a.avg_latency_ms.mean, b.avg_latency_ms.mean) ||
          !close(a.avg_reliability.mean, b.avg_reliability.mean) ||
          !close(a.facilities.mean, b.facilities.mean)) {
        issues.push_back(fmt::format("aggregate {} {} does not match its rows", a.topology,
                                     a.method));
      }
    }
  }
  return issues;
}

}  // namespace sagplace
