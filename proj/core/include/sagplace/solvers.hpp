#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sagplace/objectives.hpp"
#include "sagplace/set_function.hpp"

namespace sagplace {

struct SolveResult {
  std::vector<NodeId> open;        // selected elements as node ids, ascending
  Subset members;                  // same selection as a ground-set mask
  double value = 0.0;              // oracle.evaluate(members), re-evaluated on return
  std::size_t evaluations = 0;     // marginal / value queries made by the algorithm
  double wall_time_ms = 0.0;
  std::uint64_t seed = 0;          // 0 for deterministic algorithms

  friend bool operator==(const SolveResult&, const SolveResult&) = default;
};

/// Randomized double greedy for unconstrained non-negative submodular
/// maximization. One pass, two marginal queries per element; when both
/// clipped marginals are zero the element is kept. An empty outcome is
/// replaced by the best singleton so callers always get a facility.
SolveResult double_greedy(const SetFunctionOracle& oracle, std::uint64_t seed);

/// Best of `restarts` double_greedy runs; run r uses derive_seed(seed, r).
/// Ties keep the lowest run index. `evaluations` sums over runs.
SolveResult double_greedy_restarts(const SetFunctionOracle& oracle, std::uint64_t seed,
                                   std::size_t restarts);

/// Descending-threshold greedy for monotone submodular maximization under
/// |X| <= budget. Thresholds run from the best singleton value d down to
/// (epsilon / n) * d by factors of (1 - epsilon). An element is re-queried
/// only while its last observed gain could still reach the threshold.
SolveResult threshold_greedy(const SetFunctionOracle& oracle, std::size_t budget,
                             double epsilon = 0.1);

/// Number of threshold levels threshold_greedy visits for (n, epsilon).
std::size_t threshold_levels(std::size_t n, double epsilon);

inline constexpr std::size_t kMaxUnbudgetedGround = 25;
inline constexpr double kMaxBudgetedSubsets = 5e6;

/// Subsets exact_enumerate would visit (non-empty, size <= budget when given).
double enumeration_size(std::size_t n, std::optional<std::size_t> budget);

/// Whether exact_enumerate accepts a ground set of n with this budget.
bool enumeration_allowed(std::size_t n, std::optional<std::size_t> budget);

/// Global maximum over non-empty subsets (of size <= budget when given).
/// Ties prefer the smaller set, then the lexicographically smaller one.
/// Throws InstanceTooLarge beyond 25 elements unbudgeted or C(n, budget) > 5e6.
SolveResult exact_enumerate(const SetFunctionOracle& oracle,
                            std::optional<std::size_t> budget = std::nullopt);

enum class PlacementMode { reliability, latency_overhead };
enum class SolveMethod { approx, exact };

struct SolverOptions {
  double epsilon = 0.1;
  std::size_t restarts = 100;
};

/// Everything the two-step pipeline produces.
struct JointSolution {
  GatewayPolicy gateways;
  ControllerPolicy controllers;
  SolveResult gateway_stage;
  SolveResult controller_stage;
  double joint_utility = 0.0;  // average reliability over both assignments
  double joint_cost = 0.0;     // latency-and-overhead cost with psi
  double gateway_cost = 0.0;
  double controller_cost = 0.0;
  ControllerCostTerms controller_terms;
};

/// Gateway stage under `mode`, without the controller stage.
std::pair<GatewayPolicy, SolveResult> solve_gateways(const PathTables& tables,
                                                     const ObjectiveConfig& cfg,
                                                     PlacementMode mode, SolveMethod method,
                                                     std::uint64_t seed,
                                                     const SolverOptions& options = {});

/// Controller stage for a fixed gateway policy.
std::pair<ControllerPolicy, SolveResult> solve_controllers(const GatewayPolicy& gw,
                                                           const PathTables& tables,
                                                           const ObjectiveConfig& cfg,
                                                           PlacementMode mode, SolveMethod method,
                                                           std::uint64_t seed,
                                                           const SolverOptions& options = {});

/// Two-step placement: gateways first, then controllers given the gateways.
/// Reliability mode runs threshold_greedy under g_max / k_max; latency mode
/// runs double_greedy on the cost complements. `exact` swaps in enumeration.
JointSolution solve_joint(const Topology& topo, const PathTables& tables,
                          const ObjectiveConfig& cfg, PlacementMode mode, SolveMethod method,
                          std::uint64_t seed, const SolverOptions& options = {});

}  // namespace sagplace
