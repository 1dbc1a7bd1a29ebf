#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sagplace/objectives.hpp"
#include "sagplace/report.hpp"
#include "sagplace/solvers.hpp"
#include "sagplace/topology.hpp"

namespace sagplace {

/// A: gateway latency (double greedy), B: gateway reliability under g_max
/// (threshold greedy), C: controller latency + synchronization (double
/// greedy), D: controller reliability under k_max (threshold greedy).
enum class Experiment : char { A = 'A', B = 'B', C = 'C', D = 'D' };

Experiment parse_experiment(const std::string& s);

/// One swept parameter: alpha, beta, lcon, gmax, kmax or case.
struct Sweep {
  std::string key;
  std::vector<double> values;
};

/// Parses "key=v1,v2,..."; throws InvalidInput on unknown keys or
/// non-positive / non-finite values.
Sweep parse_sweep(const std::string& text);

enum class ExactBaseline {
  automatic,  // run exact where the size guard allows it
  always,     // fail with InstanceTooLarge when it does not
  never,
};

struct ExperimentSpec {
  Experiment experiment = Experiment::A;
  std::vector<std::string> topologies;
  int failure_case = 1;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  ObjectiveConfig cfg;
  SolverOptions solver;
  std::optional<Sweep> sweep;
  ExactBaseline exact = ExactBaseline::automatic;
  std::size_t jobs = 1;
  bool timing = false;  // record wall-clock times (makes output non-reproducible)
  GraphmlOptions graphml;
};

/// Largest unbudgeted ground set the automatic exact baseline accepts.
inline constexpr std::size_t kAutoExactUnbudgeted = 20;

/// Runs every sweep point x topology x trial. Trial t samples failures with
/// derive_seed(spec.seed, t), so trials are paired across topologies and
/// sweep points. Rows are ordered by (sweep point, topology, trial, method)
/// regardless of spec.jobs.
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Same, with topologies already loaded (names taken from Topology::name).
ExperimentReport run_experiment(const ExperimentSpec& spec,
                                const std::vector<Topology>& topologies);

/// Recomputes objective, average latency, average reliability and facility
/// count of every row from its stored open set. Returns a description of
/// each mismatch; empty when the report is self-consistent.
std::vector<std::string> verify_report(const ExperimentSpec& spec,
                                       const std::vector<Topology>& topologies,
                                       const ExperimentReport& report);

}  // namespace sagplace
