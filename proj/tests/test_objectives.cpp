#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "sagplace/errors.hpp"
#include "sagplace/facility_oracle.hpp"
#include "sagplace/objectives.hpp"
#include "support/instances.hpp"

using namespace sagplace;
using fixture::make_link;

namespace {

// Direct transcription of the controller cost, independent of the library:
// nearest-controller assignment, ordered pair sums, gateway link term.
double reference_controller_cost(const std::vector<NodeId>& open, const GatewayPolicy& gw,
                                 const Matrix& d, const ObjectiveConfig& cfg) {
  const std::size_t n = d.rows();
  std::vector<std::size_t> load(n, 0);
  double c1 = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    NodeId best = open[0];
    for (NodeId k : open) {
      if (d(k, v) < d(best, v) || (d(k, v) == d(best, v) && k < best)) best = k;
    }
    c1 += d(best, v);
    ++load[best];
  }
  double c2 = 0.0, c3 = 0.0, c4 = 0.0;
  for (NodeId m : open) {
    for (NodeId k : open) {
      if (m == k) continue;
      c2 += d(m, k);
      c3 += cfg.l_con * static_cast<double>(load[m]);
    }
    c4 += d(gw.assign[m], m);
  }
  return c1 + cfg.beta * (c2 + c3 + c4);
}

std::vector<NodeId> random_subset(std::size_t n, std::mt19937_64& rng, double keep = 0.5) {
  std::vector<NodeId> s;
  std::bernoulli_distribution coin(keep);
  for (NodeId i = 0; i < n; ++i) {
    if (coin(rng)) s.push_back(i);
  }
  if (s.empty()) s.push_back(std::uniform_int_distribution<NodeId>(0, n - 1)(rng));
  return s;
}

// Best value over every assignment matrix (each node to exactly one open facility).
double brute_assignment(const std::vector<NodeId>& open, std::size_t nodes,
                        const std::function<double(NodeId, NodeId)>& score, bool minimize) {
  double best = minimize ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> choice(nodes, 0);
  while (true) {
    double total = 0.0;
    for (NodeId v = 0; v < nodes; ++v) total += score(open[choice[v]], v);
    best = minimize ? std::min(best, total) : std::max(best, total);
    std::size_t i = 0;
    while (i < nodes && ++choice[i] == open.size()) choice[i++] = 0;
    if (i == nodes) break;
  }
  return best;
}

}  // namespace

TEST(InduceAssignment, TrivialCases) {
  const std::vector<NodeId> one{3};
  const auto a = induce_assignment(one, 4, [](NodeId, NodeId) { return 1.0; }, Sense::minimize);
  EXPECT_EQ(a, Assignment(4, 3));

  const std::vector<NodeId> two{0, 1};
  const auto near = induce_assignment(
      two, 2, [](NodeId f, NodeId v) { return f == v ? 0.0 : 5.0; }, Sense::minimize);
  EXPECT_EQ(near, (Assignment{0, 1}));
  const auto tie = induce_assignment(two, 2, [](NodeId, NodeId) { return 2.0; }, Sense::maximize);
  EXPECT_EQ(tie, (Assignment{0, 0}));

  const std::vector<NodeId> none;
  EXPECT_THROW(induce_assignment(none, 2, [](NodeId, NodeId) { return 0.0; }, Sense::minimize),
               EmptyPolicy);
}

TEST(InduceAssignment, MatchesBruteForceOverAssignmentMatrices) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const Topology t = fixture::random_topology(6, 3, rng);
    const PathTables tab = build_reliability_tables(t);
    auto open = random_subset(6, rng);
    if (open.size() > 5) open.resize(5);
    auto lat = [&](NodeId f, NodeId v) { return tab.latency(f, v); };
    auto rel = [&](NodeId f, NodeId v) { return tab.sat_reliability(f, v); };
    const auto a = induce_assignment(open, 6, lat, Sense::minimize);
    double induced = 0.0;
    for (NodeId v = 0; v < 6; ++v) induced += lat(a[v], v);
    EXPECT_DOUBLE_EQ(induced, brute_assignment(open, 6, lat, true));
    EXPECT_DOUBLE_EQ(gateway_utility(open, tab), brute_assignment(open, 6, rel, false));
  }
}

TEST(GatewayCost, HandExamples) {
  const PathTables tab = build_reliability_tables(fixture::path_abc());
  ObjectiveConfig cfg;
  const std::vector<NodeId> b{1};
  EXPECT_DOUBLE_EQ(gateway_cost(b, tab, cfg), 4.0);
  const std::vector<NodeId> all{0, 1, 2};
  EXPECT_DOUBLE_EQ(gateway_cost(all, tab, cfg), 3.0);
  cfg.alpha = 0.0;
  const std::vector<NodeId> ac{0, 2};
  EXPECT_DOUBLE_EQ(gateway_cost(ac, tab, cfg), 2.0);
  const std::vector<NodeId> none;
  EXPECT_THROW(gateway_cost(none, tab, cfg), EmptyPolicy);
}

TEST(GatewayCost, AlphaOnlyScalesLatency) {
  std::mt19937_64 rng(4);
  const Topology t = fixture::random_topology(10, 6, rng);
  const PathTables tab = build_reliability_tables(t);
  ObjectiveConfig zero;
  zero.alpha = 0.0;
  ObjectiveConfig one, three;
  three.alpha = 3.0;
  for (int i = 0; i < 50; ++i) {
    const auto open = random_subset(10, rng);
    const double n = static_cast<double>(open.size());
    EXPECT_DOUBLE_EQ(gateway_cost(open, tab, zero), n);
    EXPECT_NEAR(gateway_cost(open, tab, three) - n, 3 * (gateway_cost(open, tab, one) - n), 1e-9);
  }
}

TEST(GatewayUtility, Basics) {
  const PathTables clean = build_reliability_tables(load_topology("Nsfnet"));
  const std::vector<NodeId> two{3, 7};
  EXPECT_DOUBLE_EQ(gateway_utility(two, clean), 13.0);

  std::mt19937_64 rng(9);
  const PathTables tab = build_reliability_tables(fixture::random_topology(8, 4, rng));
  const std::vector<NodeId> single{5};
  double sum = 0.0;
  for (NodeId v = 0; v < 8; ++v) sum += tab.sat_reliability(5, v);
  EXPECT_DOUBLE_EQ(gateway_utility(single, tab), sum);
}

TEST(ControllerCost, LoadTermCountsOrderedPairs) {
  // 0-1-2-3-4, unit latencies; controllers {1, 4} serve {0,1,2} and {3,4}.
  Topology t = fixture::bare_topology(5);
  for (NodeId i = 0; i + 1 < 5; ++i) t.links.push_back(make_link(i, i + 1, 1.0));
  const PathTables tab = build_reliability_tables(t);
  ObjectiveConfig cfg;
  cfg.l_con = 1.0;
  const GatewayPolicy gw = make_gateway_policy({0}, tab, AssignRule::latency);
  const std::vector<NodeId> open{1, 4};
  const ControllerCostTerms terms = controller_cost_terms(open, gw, tab, cfg);
  EXPECT_DOUBLE_EQ(terms.load, 5.0);
  EXPECT_DOUBLE_EQ(terms.pair_latency, 6.0);
  EXPECT_DOUBLE_EQ(terms.assignment, 1 + 0 + 1 + 1 + 0);
  EXPECT_DOUBLE_EQ(terms.gateway_link, 1.0 + 4.0);
  EXPECT_DOUBLE_EQ(terms.total, 3.0 + 1.0 * (6 + 5 + 5));
  EXPECT_DOUBLE_EQ(controller_cost(open, gw, tab, cfg), terms.total);
}

TEST(ControllerCost, SingleControllerHasNoPairTerms) {
  std::mt19937_64 rng(12);
  const PathTables tab = build_reliability_tables(fixture::random_topology(9, 5, rng));
  ObjectiveConfig cfg;
  cfg.beta = 2.5;
  const GatewayPolicy gw = make_gateway_policy({2, 6}, tab, AssignRule::latency);
  const std::vector<NodeId> k{4};
  double sum = 0.0;
  for (NodeId v = 0; v < 9; ++v) sum += tab.latency(4, v);
  const auto terms = controller_cost_terms(k, gw, tab, cfg);
  EXPECT_DOUBLE_EQ(terms.pair_latency, 0.0);
  EXPECT_DOUBLE_EQ(terms.load, 0.0);
  EXPECT_NEAR(terms.total, sum + 2.5 * tab.latency(gw.assign[4], 4), 1e-12);
}

TEST(ControllerCost, MatchesReferenceOnRandomInstances) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const PathTables tab = build_reliability_tables(fixture::random_topology(10, 8, rng));
    ObjectiveConfig cfg;
    cfg.beta = std::uniform_real_distribution<double>(0.05, 5)(rng);
    cfg.l_con = std::uniform_real_distribution<double>(0.0, 2)(rng);
    const GatewayPolicy gw = make_gateway_policy(random_subset(10, rng), tab, AssignRule::latency);
    for (int i = 0; i < 20; ++i) {
      const auto open = random_subset(10, rng);
      EXPECT_NEAR(controller_cost(open, gw, tab, cfg),
                  reference_controller_cost(open, gw, tab.d, cfg), 1e-9);
    }
  }
}

TEST(ControllerUtility, FailureFreeAndMonotoneUpperValue) {
  const PathTables clean = build_reliability_tables(load_topology("Sinet"));
  const std::vector<NodeId> some{0, 4};
  EXPECT_DOUBLE_EQ(controller_utility(some, clean), 13.0);

  std::mt19937_64 rng(6);
  const PathTables tab = build_reliability_tables(fixture::random_topology(12, 6, rng));
  std::vector<NodeId> all(12);
  std::iota(all.begin(), all.end(), 0);
  double best = 0.0;
  for (NodeId v = 0; v < 12; ++v) {
    double m = 0.0;
    for (NodeId k : all) m = std::max(m, tab.ctl_reliability(k, v));
    best += m;
  }
  EXPECT_DOUBLE_EQ(controller_utility(all, tab), best);
}

TEST(JointUtility, Decomposes) {
  const PathTables clean = build_reliability_tables(load_topology("Nsfnet"));
  const auto gw0 = make_gateway_policy({1}, clean, AssignRule::reliability);
  const auto ctl0 = make_controller_policy({2, 3}, clean, AssignRule::reliability);
  EXPECT_DOUBLE_EQ(joint_utility(gw0, ctl0, clean), 2.0);

  // Two nodes, gateway and controller both at node 0.
  Topology t = fixture::bare_topology(2);
  t.links = {make_link(0, 1, 1.0, 0.02)};
  t.nodes[0].failure_prob = 0.05;
  t.nodes[1].failure_prob = 0.03;
  t.sat_link_failure_prob = 0.01;
  const PathTables two = build_reliability_tables(t);
  const auto gw = make_gateway_policy({0}, two, AssignRule::reliability);
  const auto ctl = make_controller_policy({0}, two, AssignRule::reliability);
  const double sat = 0.99 * 0.95 + 0.99 * 0.95 * 0.98 * 0.97;
  const double ctl_sum = 0.95 + 0.95 * 0.98 * 0.97;
  EXPECT_NEAR(joint_utility(gw, ctl, two), (sat + ctl_sum) / 2, 1e-12);

  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const PathTables tab = build_reliability_tables(fixture::random_topology(9, 5, rng));
    const auto g = make_gateway_policy(random_subset(9, rng), tab, AssignRule::reliability);
    const auto c = make_controller_policy(random_subset(9, rng), tab, AssignRule::reliability);
    EXPECT_NEAR(joint_utility(g, c, tab),
                gateway_utility(g.open, tab) / 9 + controller_utility(c.open, tab) / 9, 1e-12);
  }
}

TEST(JointCost, CombinesBothBlocks) {
  std::mt19937_64 rng(10);
  const PathTables tab = build_reliability_tables(fixture::random_topology(9, 5, rng));
  ObjectiveConfig cfg;
  cfg.psi = 0.5;
  const auto g = make_gateway_policy({1, 3}, tab, AssignRule::latency);
  const auto c = make_controller_policy({0, 8}, tab, AssignRule::latency);
  EXPECT_NEAR(joint_cost(g, c, tab, cfg),
              gateway_cost(g.open, tab, cfg) + 0.5 * controller_cost(c.open, g, tab, cfg), 1e-9);
}

TEST(Complements, NonNegativeAndArgmaxIsArgmin) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 5; ++trial) {
    const PathTables tab = build_reliability_tables(fixture::random_topology(10, 6, rng));
    ObjectiveConfig cfg;
    cfg.alpha = std::uniform_real_distribution<double>(0.01, 0.5)(rng);
    const GatewayPolicy gw = make_gateway_policy({0, 5}, tab, AssignRule::latency);
    double best_cost = std::numeric_limits<double>::infinity(), best_comp = -1;
    std::vector<NodeId> argmin, argmax;
    for (const auto& s : fixture::nonempty_subsets(10)) {
      const double comp = gateway_cost_complement(s, tab, cfg);
      EXPECT_GE(comp, 0.0);
      EXPECT_GE(controller_cost_complement(s, gw, tab, cfg), 0.0);
      const double cost = gateway_cost(s, tab, cfg);
      if (cost < best_cost) best_cost = cost, argmin = s;
      if (comp > best_comp) best_comp = comp, argmax = s;
    }
    EXPECT_EQ(argmin, argmax);
    std::vector<NodeId> all(10);
    std::iota(all.begin(), all.end(), 0);
    EXPECT_NEAR(gateway_cost_complement(all, tab, cfg), gateway_cost_bound(tab, cfg) - 10.0, 1e-9);
  }
}

TEST(FacilityOracle, ValuesMatchObjectives) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const PathTables tab = build_reliability_tables(fixture::random_topology(11, 8, rng));
    ObjectiveConfig cfg;
    cfg.alpha = 0.2;
    cfg.beta = 0.7;
    cfg.l_con = 0.3;
    const GatewayPolicy gw = make_gateway_policy(random_subset(11, rng), tab, AssignRule::latency);
    const auto gu = gateway_utility_oracle(tab);
    const auto gc = gateway_complement_oracle(tab, cfg);
    const auto cu = controller_utility_oracle(tab);
    const auto cc = controller_complement_oracle(gw, tab, cfg);
    EXPECT_EQ(gu.evaluate(Subset(11, false)), 0.0);
    EXPECT_EQ(cc.evaluate(Subset(11, false)), 0.0);
    for (int i = 0; i < 30; ++i) {
      const auto open = random_subset(11, rng);
      std::vector<std::size_t> idx(open.begin(), open.end());
      const Subset s = make_subset(11, idx);
      EXPECT_NEAR(gu.evaluate(s), gateway_utility(open, tab), 1e-9);
      EXPECT_NEAR(gc.evaluate(s), gateway_cost_complement(open, tab, cfg), 1e-9);
      EXPECT_NEAR(cu.evaluate(s), controller_utility(open, tab), 1e-9);
      EXPECT_NEAR(cc.evaluate(s), controller_cost_complement(open, gw, tab, cfg), 1e-9);
    }
  }
}

TEST(FacilityOracle, IncrementalAgreesWithNaive) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const PathTables tab = build_reliability_tables(fixture::random_topology(12, 9, rng));
    ObjectiveConfig cfg;
    cfg.alpha = 0.3;
    const GatewayPolicy gw = make_gateway_policy({1, 7}, tab, AssignRule::latency);
    const auto oracles = {gateway_utility_oracle(tab), gateway_complement_oracle(tab, cfg),
                          controller_utility_oracle(tab),
                          controller_complement_oracle(gw, tab, cfg)};
    for (const auto& f : oracles) {
      for (bool full : {false, true}) {
        auto ev = f.start(full);
        std::uniform_int_distribution<std::size_t> pick(0, 11);
        for (int step = 0; step < 200; ++step) {
          const std::size_t i = pick(rng);
          Subset next = ev->members();
          const double here = f.evaluate(ev->members());
          ASSERT_NEAR(ev->value(), here, 1e-9);
          if (ev->members()[i]) {
            next[i] = false;
            ASSERT_NEAR(ev->remove_gain(i), f.evaluate(next) - here, 1e-9);
            ev->remove(i);
          } else {
            next[i] = true;
            ASSERT_NEAR(ev->add_gain(i), f.evaluate(next) - here, 1e-9);
            ev->add(i);
          }
          auto copy = ev->clone();
          ASSERT_EQ(copy->members(), ev->members());
          ASSERT_NEAR(copy->value(), ev->value(), 1e-12);
        }
      }
    }
  }
}

TEST(ObjectiveConfig, Validation) {
  const PathTables tab = build_reliability_tables(fixture::path_abc());
  ObjectiveConfig ok;
  ok.g_max = ok.k_max = 3;
  EXPECT_NO_THROW(ok.validate(tab));
  auto bad = ok;
  bad.g_max = 4;
  EXPECT_THROW(bad.validate(tab), InvalidInput);
  bad = ok;
  bad.k_max = 0;
  EXPECT_THROW(bad.validate(tab), InvalidInput);
  bad = ok;
  bad.alpha = -1;
  EXPECT_THROW(bad.validate(tab), InvalidInput);
  bad = ok;
  bad.beta = std::numeric_limits<double>::infinity();
  EXPECT_THROW(bad.validate(tab), InvalidInput);
}
