#include <fmt/format.h>

#include "sagplace/errors.hpp"
#include "sagplace/facility_oracle.hpp"
#include "sagplace/solvers.hpp"

namespace sagplace {

std::pair<GatewayPolicy, SolveResult> solve_gateways(const PathTables& tables,
                                                     const ObjectiveConfig& cfg,
                                                     PlacementMode mode, SolveMethod method,
                                                     std::uint64_t seed,
                                                     const SolverOptions& options) {
  SolveResult r;
  if (mode == PlacementMode::reliability) {
    const auto oracle = gateway_utility_oracle(tables);
    r = method == SolveMethod::approx ? threshold_greedy(oracle, cfg.g_max, options.epsilon)
                                      : exact_enumerate(oracle, cfg.g_max);
    return {make_gateway_policy(r.open, tables, AssignRule::reliability), std::move(r)};
  }
  const auto oracle = gateway_complement_oracle(tables, cfg);
  r = method == SolveMethod::approx ? double_greedy_restarts(oracle, seed, options.restarts)
                                    : exact_enumerate(oracle);
  return {make_gateway_policy(r.open, tables, AssignRule::latency), std::move(r)};
}

std::pair<ControllerPolicy, SolveResult> solve_controllers(const GatewayPolicy& gw,
                                                           const PathTables& tables,
                                                           const ObjectiveConfig& cfg,
                                                           PlacementMode mode, SolveMethod method,
                                                           std::uint64_t seed,
                                                           const SolverOptions& options) {
  SolveResult r;
  if (mode == PlacementMode::reliability) {
    const auto oracle = controller_utility_oracle(tables);
    r = method == SolveMethod::approx ? threshold_greedy(oracle, cfg.k_max, options.epsilon)
                                      : exact_enumerate(oracle, cfg.k_max);
    return {make_controller_policy(r.open, tables, AssignRule::reliability), std::move(r)};
  }
  const auto oracle = controller_complement_oracle(gw, tables, cfg);
  r = method == SolveMethod::approx ? double_greedy_restarts(oracle, seed, options.restarts)
                                    : exact_enumerate(oracle);
  return {make_controller_policy(r.open, tables, AssignRule::latency), std::move(r)};
}

JointSolution solve_joint(const Topology& topo, const PathTables& tables,
                          const ObjectiveConfig& cfg, PlacementMode mode, SolveMethod method,
                          std::uint64_t seed, const SolverOptions& options) {
  if (tables.nodes() != topo.size()) {
    throw InvalidInput(fmt::format("tables cover {} nodes, topology has {}", tables.nodes(),
                                   topo.size()));
  }
  cfg.validate(tables);

  JointSolution s;
  auto [gw, gw_run] = solve_gateways(tables, cfg, mode, method, derive_seed(seed, 0), options);
  s.gateways = std::move(gw);
  s.gateway_stage = std::move(gw_run);
  auto [ctl, ctl_run] =
      solve_controllers(s.gateways, tables, cfg, mode, method, derive_seed(seed, 1), options);
  s.controllers = std::move(ctl);
  s.controller_stage = std::move(ctl_run);

  s.joint_utility = joint_utility(s.gateways, s.controllers, tables);
  s.joint_cost = joint_cost(s.gateways, s.controllers, tables, cfg);
  s.gateway_cost = gateway_cost(s.gateways.open, tables, cfg);
  s.controller_terms = controller_cost_terms(s.controllers.open, s.gateways, tables, cfg);
  s.controller_cost = s.controller_terms.total;
  return s;
}

}  // namespace sagplace
