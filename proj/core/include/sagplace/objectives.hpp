#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sagplace/errors.hpp"
#include "sagplace/paths.hpp"

namespace sagplace {

/// Weights and budgets shared by the gateway and controller objectives.
struct ObjectiveConfig {
  double alpha = 1.0;   // gateway latency weight
  double beta = 1.0;    // synchronization weight
  double psi = 1.0;     // controller block weight in the joint cost
  double l_con = 0.1;   // per-node synchronization rate between controller pairs
  std::size_t g_max = 5;
  std::size_t k_max = 5;
  std::size_t k_paths = 1;

  /// Throws InvalidInput on negative/non-finite weights, zero budgets, or
  /// budgets exceeding the candidate sets of `tables`.
  void validate(const PathTables& tables) const;
};

/// assign[v] = facility node serving v.
using Assignment = std::vector<NodeId>;

enum class Sense { minimize, maximize };

/// Maps every node to its best open facility under `score(facility, node)`.
/// Ties go to the lowest facility id. Throws EmptyPolicy when `open` is empty.
template <class Score>
Assignment induce_assignment(std::span<const NodeId> open, std::size_t nodes, Score&& score,
                             Sense sense) {
  if (open.empty()) throw EmptyPolicy();
  Assignment out(nodes);
  for (NodeId v = 0; v < nodes; ++v) {
    NodeId best = open[0];
    double best_score = score(open[0], v);
    for (std::size_t i = 1; i < open.size(); ++i) {
      const double s = score(open[i], v);
      const bool better = sense == Sense::minimize ? s < best_score : s > best_score;
      if (better || (s == best_score && open[i] < best)) {
        best = open[i];
        best_score = s;
      }
    }
    out[v] = best;
  }
  return out;
}

struct FacilityPolicy {
  std::vector<NodeId> open;  // sorted, unique
  Assignment assign;

  friend bool operator==(const FacilityPolicy&, const FacilityPolicy&) = default;
};

struct GatewayPolicy : FacilityPolicy {};
struct ControllerPolicy : FacilityPolicy {};

/// Which induced assignment a policy carries: nearest by latency or most reliable.
enum class AssignRule { latency, reliability };

GatewayPolicy make_gateway_policy(std::vector<NodeId> open, const PathTables& tables,
                                  AssignRule rule);
ControllerPolicy make_controller_policy(std::vector<NodeId> open, const PathTables& tables,
                                        AssignRule rule);

/// |open| + alpha * sum_v d(nearest open gateway, v).
double gateway_cost(std::span<const NodeId> open, const PathTables& tables,
                    const ObjectiveConfig& cfg);

/// sum_v max_{j in open} r_sat(j, v).
double gateway_utility(std::span<const NodeId> open, const PathTables& tables);

/// Upper bound of gateway_cost over non-empty sets:
/// |G| + alpha * sum_v max_j d(j, v).
double gateway_cost_bound(const PathTables& tables, const ObjectiveConfig& cfg);

/// gateway_cost_bound - gateway_cost(open); non-negative.
double gateway_cost_complement(std::span<const NodeId> open, const PathTables& tables,
                               const ObjectiveConfig& cfg);

/// The four controller cost terms, each unweighted. Pair sums run over
/// ordered pairs m != n of open controllers; nodes go to the nearest open
/// controller.
struct ControllerCostTerms {
  double assignment = 0.0;    // sum_v d(controller(v), v)
  double pair_latency = 0.0;  // sum_{m != n} d(m, n)
  double load = 0.0;          // sum_{m != n} l_con * load(m)
  double gateway_link = 0.0;  // sum_m d(gateway(m), m)
  double total = 0.0;         // assignment + beta * sync()

  double sync() const noexcept { return pair_latency + load + gateway_link; }
};

ControllerCostTerms controller_cost_terms(std::span<const NodeId> open, const GatewayPolicy& gw,
                                          const PathTables& tables, const ObjectiveConfig& cfg);

double controller_cost(std::span<const NodeId> open, const GatewayPolicy& gw,
                       const PathTables& tables, const ObjectiveConfig& cfg);

/// sum_v max_{k in open} r_ctl(k, v).
double controller_utility(std::span<const NodeId> open, const PathTables& tables);

/// Upper bound of controller_cost over non-empty subsets of the candidates.
double controller_cost_bound(const GatewayPolicy& gw, const PathTables& tables,
                             const ObjectiveConfig& cfg);

double controller_cost_complement(std::span<const NodeId> open, const GatewayPolicy& gw,
                                  const PathTables& tables, const ObjectiveConfig& cfg);

/// Average node reliability over both assignments, in [0, 2].
double joint_utility(const GatewayPolicy& gw, const ControllerPolicy& ctl,
                     const PathTables& tables);

/// Latency-and-overhead cost of a full placement:
/// |X| + alpha * gateway latency + psi * (controller latency + beta * sync).
double joint_cost(const GatewayPolicy& gw, const ControllerPolicy& ctl, const PathTables& tables,
                  const ObjectiveConfig& cfg);

/// Mean d(assign[v], v).
double average_latency(const FacilityPolicy& policy, const PathTables& tables);
/// Mean r_sat(assign[v], v).
double average_reliability(const GatewayPolicy& policy, const PathTables& tables);
/// Mean r_ctl(assign[v], v).
double average_reliability(const ControllerPolicy& policy, const PathTables& tables);

}  // namespace sagplace
