#include "sagplace/objectives.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace sagplace {

namespace {

std::vector<NodeId> normalized(std::span<const NodeId> open) {
  if (open.empty()) throw EmptyPolicy();
  std::vector<NodeId> out(open.begin(), open.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<NodeId> gateway_set(std::span<const NodeId> open, const PathTables& tables) {
  auto out = normalized(open);
  for (NodeId j : out) tables.gateway_row(j);
  return out;
}

std::vector<NodeId> controller_set(std::span<const NodeId> open, const PathTables& tables) {
  auto out = normalized(open);
  for (NodeId k : out) tables.controller_row(k);
  return out;
}

Assignment nearest(std::span<const NodeId> open, const PathTables& tables) {
  return induce_assignment(
      open, tables.nodes(), [&](NodeId f, NodeId v) { return tables.latency(f, v); },
      Sense::minimize);
}

void check_assignment(const FacilityPolicy& p, const PathTables& tables) {
  if (p.open.empty()) throw EmptyPolicy();
  if (p.assign.size() != tables.nodes()) {
    throw InvalidInput(fmt::format("assignment covers {} nodes, topology has {}", p.assign.size(),
                                   tables.nodes()));
  }
}

}  // namespace

void ObjectiveConfig::validate(const PathTables& tables) const {
  for (double w : {alpha, beta, psi, l_con}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidInput("objective weights must be finite and non-negative");
    }
  }
  if (g_max == 0 || g_max > tables.gateways.size()) {
    throw InvalidInput(fmt::format("g_max must be in 1..{}, got {}", tables.gateways.size(), g_max));
  }
  if (k_max == 0 || k_max > tables.controllers.size()) {
    throw InvalidInput(
        fmt::format("k_max must be in 1..{}, got {}", tables.controllers.size(), k_max));
  }
  if (k_paths == 0) throw InvalidInput("k_paths must be at least 1");
}

GatewayPolicy make_gateway_policy(std::vector<NodeId> open, const PathTables& tables,
                                  AssignRule rule) {
  GatewayPolicy p;
  p.open = gateway_set(open, tables);
  if (rule == AssignRule::latency) {
    p.assign = nearest(p.open, tables);
  } else {
    p.assign = induce_assignment(
        p.open, tables.nodes(), [&](NodeId j, NodeId v) { return tables.sat_reliability(j, v); },
        Sense::maximize);
  }
  return p;
}

ControllerPolicy make_controller_policy(std::vector<NodeId> open, const PathTables& tables,
                                        AssignRule rule) {
  ControllerPolicy p;
  p.open = controller_set(open, tables);
  if (rule == AssignRule::latency) {
    p.assign = nearest(p.open, tables);
  } else {
    p.assign = induce_assignment(
        p.open, tables.nodes(), [&](NodeId k, NodeId v) { return tables.ctl_reliability(k, v); },
        Sense::maximize);
  }
  return p;
}

double gateway_cost(std::span<const NodeId> open, const PathTables& tables,
                    const ObjectiveConfig& cfg) {
  const auto set = gateway_set(open, tables);
  const Assignment assign = nearest(set, tables);
  double latency = 0.0;
  for (NodeId v = 0; v < tables.nodes(); ++v) latency += tables.latency(assign[v], v);
  return static_cast<double>(set.size()) + cfg.alpha * latency;
}

double gateway_utility(std::span<const NodeId> open, const PathTables& tables) {
  const auto set = gateway_set(open, tables);
  double sum = 0.0;
  for (NodeId v = 0; v < tables.nodes(); ++v) {
    double best = 0.0;
    for (NodeId j : set) best = std::max(best, tables.sat_reliability(j, v));
    sum += best;
  }
  return sum;
}

double gateway_cost_bound(const PathTables& tables, const ObjectiveConfig& cfg) {
  double farthest = 0.0;
  for (NodeId v = 0; v < tables.nodes(); ++v) {
    double worst = 0.0;
    for (NodeId j : tables.gateways) worst = std::max(worst, tables.latency(j, v));
    farthest += worst;
  }
  return static_cast<double>(tables.gateways.size()) + cfg.alpha * farthest;
}

double gateway_cost_complement(std::span<const NodeId> open, const PathTables& tables,
                               const ObjectiveConfig& cfg) {
  return gateway_cost_bound(tables, cfg) - gateway_cost(open, tables, cfg);
}

ControllerCostTerms controller_cost_terms(std::span<const NodeId> open, const GatewayPolicy& gw,
                                          const PathTables& tables, const ObjectiveConfig& cfg) {
  check_assignment(gw, tables);
  const auto set = controller_set(open, tables);
  const Assignment assign = nearest(set, tables);

  ControllerCostTerms t;
  std::vector<double> load(tables.nodes(), 0.0);
  for (NodeId v = 0; v < tables.nodes(); ++v) {
    t.assignment += tables.latency(assign[v], v);
    load[assign[v]] += 1.0;
  }
  for (NodeId m : set) {
    for (NodeId n : set) {
      if (m == n) continue;
      t.pair_latency += tables.latency(m, n);
      t.load += cfg.l_con * load[m];
    }
    t.gateway_link += tables.latency(gw.assign[m], m);
  }
  t.total = t.assignment + cfg.beta * t.sync();
  return t;
}

double controller_cost(std::span<const NodeId> open, const GatewayPolicy& gw,
                       const PathTables& tables, const ObjectiveConfig& cfg) {
  return controller_cost_terms(open, gw, tables, cfg).total;
}

double controller_utility(std::span<const NodeId> open, const PathTables& tables) {
  const auto set = controller_set(open, tables);
  double sum = 0.0;
  for (NodeId v = 0; v < tables.nodes(); ++v) {
    double best = 0.0;
    for (NodeId k : set) best = std::max(best, tables.ctl_reliability(k, v));
    sum += best;
  }
  return sum;
}

double controller_cost_bound(const GatewayPolicy& gw, const PathTables& tables,
                             const ObjectiveConfig& cfg) {
  check_assignment(gw, tables);
  const auto& cands = tables.controllers;
  double assignment = 0.0;
  for (NodeId v = 0; v < tables.nodes(); ++v) {
    double worst = 0.0;
    for (NodeId k : cands) worst = std::max(worst, tables.latency(k, v));
    assignment += worst;
  }
  double pairs = 0.0;
  double gateway_link = 0.0;
  for (NodeId m : cands) {
    for (NodeId n : cands) pairs += m == n ? 0.0 : tables.latency(m, n);
    gateway_link += tables.latency(gw.assign[m], m);
  }
  const double load = cfg.l_con * static_cast<double>(tables.nodes()) *
                      static_cast<double>(cands.size() - 1);
  return assignment + cfg.beta * (pairs + load + gateway_link);
}

double controller_cost_complement(std::span<const NodeId> open, const GatewayPolicy& gw,
                                  const PathTables& tables, const ObjectiveConfig& cfg) {
  return controller_cost_bound(gw, tables, cfg) - controller_cost(open, gw, tables, cfg);
}

double joint_utility(const GatewayPolicy& gw, const ControllerPolicy& ctl,
                     const PathTables& tables) {
  check_assignment(gw, tables);
  check_assignment(ctl, tables);
  double sum = 0.0;
  for (NodeId v = 0; v < tables.nodes(); ++v) {
    sum += tables.sat_reliability(gw.assign[v], v) + tables.ctl_reliability(ctl.assign[v], v);
  }
  return sum / static_cast<double>(tables.nodes());
}

double joint_cost(const GatewayPolicy& gw, const ControllerPolicy& ctl, const PathTables& tables,
                  const ObjectiveConfig& cfg) {
  check_assignment(gw, tables);
  check_assignment(ctl, tables);
  double gw_latency = 0.0;
  for (NodeId v = 0; v < tables.nodes(); ++v) gw_latency += tables.latency(gw.assign[v], v);
  const auto terms = controller_cost_terms(ctl.open, gw, tables, cfg);
  return static_cast<double>(gw.open.size()) + cfg.alpha * gw_latency +
         cfg.psi * (terms.assignment + cfg.beta * terms.sync());
}

double average_latency(const FacilityPolicy& policy, const PathTables& tables) {
  check_assignment(policy, tables);
  double sum = 0.0;
  for (NodeId v = 0; v < tables.nodes(); ++v) sum += tables.latency(policy.assign[v], v);
  return sum / static_cast<double>(tables.nodes());
}

double average_reliability(const GatewayPolicy& policy, const PathTables& tables) {
  check_assignment(policy, tables);
  double sum = 0.0;
  for (NodeId v = 0; v < tables.nodes(); ++v) sum += tables.sat_reliability(policy.assign[v], v);
  return sum / static_cast<double>(tables.nodes());
}

double average_reliability(const ControllerPolicy& policy, const PathTables& tables) {
  check_assignment(policy, tables);
  double sum = 0.0;
  for (NodeId v = 0; v < tables.nodes(); ++v) sum += tables.ctl_reliability(policy.assign[v], v);
  return sum / static_cast<double>(tables.nodes());
}

}  // namespace sagplace
