#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "sagplace/errors.hpp"
#include "sagplace/topology.hpp"
#include "support/instances.hpp"

using namespace sagplace;

namespace {

// Textbook haversine written independently of the library.
double reference_haversine(double lat1, double lon1, double lat2, double lon2) {
  const double r = std::numbers::pi / 180.0;
  const double a = std::pow(std::sin((lat2 - lat1) * r / 2), 2) +
                   std::cos(lat1 * r) * std::cos(lat2 * r) * std::pow(std::sin((lon2 - lon1) * r / 2), 2);
  return 2 * 6371.0 * std::atan2(std::sqrt(a), std::sqrt(1 - a));
}

const char* kTwoNodes = R"(<?xml version="1.0"?>
<graphml xmlns="http://graphml.graphdrawing.org/xmlns">
  <key attr.name="Latitude" attr.type="double" for="node" id="d1"/>
  <key attr.name="Longitude" attr.type="double" for="node" id="d2"/>
  <key attr.name="label" attr.type="string" for="node" id="d3"/>
  <graph edgedefault="undirected">
    <node id="x"><data key="d1">0</data><data key="d2">0</data><data key="d3">X</data></node>
    <node id="y"><data key="d1">0</data><data key="d2">0</data><data key="d3">Y</data></node>
    <edge source="x" target="y"/>
  </graph>
</graphml>)";

}  // namespace

TEST(Haversine, KnownDistances) {
  EXPECT_DOUBLE_EQ(haversine_km({12.5, -40.0}, {12.5, -40.0}), 0.0);
  EXPECT_NEAR(haversine_km({0, 0}, {90, 0}), std::numbers::pi / 2 * 6371.0, 0.01);
  EXPECT_NEAR(haversine_km({0, 0}, {90, 0}), 10007.54, 0.01);
  EXPECT_NEAR(haversine_km({0, 0}, {0, 180}), 20015.09, 0.01);
}

TEST(Haversine, MatchesReferenceSymmetricAndTriangle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
  for (int i = 0; i < 2000; ++i) {
    const GeoPoint a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)}, c{lat(rng), lon(rng)};
    const double ab = haversine_km(a, b);
    EXPECT_NEAR(ab, reference_haversine(a.lat_deg, a.lon_deg, b.lat_deg, b.lon_deg), 1e-6);
    EXPECT_NEAR(ab, haversine_km(b, a), 1e-9);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(haversine_km(a, c), ab + haversine_km(b, c) + 1e-9);
  }
}

TEST(LinkLatency, FiberSpeed) {
  EXPECT_DOUBLE_EQ(link_latency_ms(0), 0.0);
  EXPECT_NEAR(link_latency_ms(200), 1.0, 1e-12);
  EXPECT_NEAR(link_latency_ms(1000), 5.0, 1e-12);
  EXPECT_NEAR(link_latency_ms(1000, 100000), 10.0, 1e-12);
  EXPECT_THROW(link_latency_ms(-1), InvalidInput);
}

TEST(Graphml, BundledNodeAndLinkCounts) {
  const std::pair<const char*, std::pair<std::size_t, std::size_t>> expected[] = {
      {"Nsfnet", {13, 15}}, {"Sinet", {13, 18}}, {"Ans", {18, 25}}, {"Tinet", {53, 89}}};
  for (const auto& [name, counts] : expected) {
    const Topology t = load_topology(name);
    EXPECT_EQ(t.size(), counts.first) << name;
    EXPECT_EQ(t.links.size(), counts.second) << name;
    EXPECT_EQ(t.gateway_candidates().size(), t.size());
    EXPECT_EQ(t.controller_candidates().size(), t.size());
  }
  EXPECT_EQ(load_topology("tinet").size(), 53u);
  EXPECT_THROW(load_topology("NoSuchNet"), InvalidInput);
}

TEST(Graphml, CoincidentEndpointsGiveZeroLatency) {
  const Topology t = load_graphml(kTwoNodes);
  ASSERT_EQ(t.size(), 2u);
  ASSERT_EQ(t.links.size(), 1u);
  EXPECT_EQ(t.nodes[0].name, "X");
  EXPECT_DOUBLE_EQ(t.links[0].length_km, 0.0);
  EXPECT_DOUBLE_EQ(t.links[0].latency_ms, 0.0);
}

TEST(Graphml, LengthAttributeAndHaversineFallback) {
  const std::string doc = R"(<graphml>
  <key attr.name="Latitude" for="node" id="a"/><key attr.name="Longitude" for="node" id="b"/>
  <key attr.name="length" for="edge" id="e"/>
  <graph>
    <node id="0"><data key="a">0</data><data key="b">0</data></node>
    <node id="1"><data key="a">0</data><data key="b">1</data></node>
    <node id="2"><data key="a">1</data><data key="b">1</data></node>
    <edge source="0" target="1"><data key="e">400</data></edge>
    <edge source="1" target="0"><data key="e">300</data></edge>
    <edge source="1" target="2"/>
    <edge source="2" target="2"/>
  </graph></graphml>)";
  const Topology t = load_graphml(doc);
  ASSERT_EQ(t.links.size(), 2u);
  EXPECT_DOUBLE_EQ(t.links[0].length_km, 300.0);  // parallel edges keep the shorter
  EXPECT_NEAR(t.links[0].latency_ms, 1.5, 1e-12);
  EXPECT_NEAR(t.links[1].length_km, haversine_km({0, 1}, {1, 1}), 1e-9);
}

TEST(Graphml, Rejections) {
  const std::string missing = R"(<graphml><key attr.name="Latitude" for="node" id="a"/>
    <graph><node id="lonely"><data key="a">3</data></node></graph></graphml>)";
  try {
    load_graphml(missing);
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("lonely"), std::string::npos);
  }

  const std::string split = R"(<graphml>
    <key attr.name="Latitude" for="node" id="a"/><key attr.name="Longitude" for="node" id="b"/>
    <graph>
    <node id="p"><data key="a">0</data><data key="b">0</data></node>
    <node id="q"><data key="a">0</data><data key="b">1</data></node>
    <node id="r"><data key="a">0</data><data key="b">2</data></node>
    <edge source="p" target="q"/></graph></graphml>)";
  try {
    load_graphml(split);
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("disconnected"), std::string::npos) << e.what();
  }

  EXPECT_THROW(load_graphml("<graphml><graph><node id="), InvalidInput);
  const std::string dangling = R"(<graphml>
    <key attr.name="Latitude" for="node" id="a"/><key attr.name="Longitude" for="node" id="b"/>
    <graph><node id="p"><data key="a">0</data><data key="b">0</data></node>
    <edge source="p" target="ghost"/></graph></graphml>)";
  EXPECT_THROW(load_graphml(dangling), InvalidInput);
}

TEST(FailureCase, BuiltinBounds) {
  const FailureCase c1 = FailureCase::builtin(1);
  EXPECT_DOUBLE_EQ(c1.node_hi, 0.05);
  EXPECT_DOUBLE_EQ(c1.link_hi, 0.02);
  EXPECT_DOUBLE_EQ(c1.sat_hi, 0.02);
  const FailureCase c4 = FailureCase::builtin(4);
  EXPECT_DOUBLE_EQ(c4.node_hi, 0.08);
  EXPECT_THROW(FailureCase::builtin(0), InvalidInput);
  EXPECT_THROW(FailureCase::builtin(5), InvalidInput);
}

TEST(SampleFailures, RangesAndDeterminism) {
  const Topology base = load_topology("Ans");
  for (int id = 1; id <= 4; ++id) {
    const FailureCase fc = FailureCase::builtin(id);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const Topology t = sample_failures(base, fc, seed);
      for (const Node& n : t.nodes) {
        EXPECT_GE(n.failure_prob, 0.0);
        EXPECT_LE(n.failure_prob, fc.node_hi);
      }
      for (const Link& l : t.links) {
        EXPECT_GE(l.failure_prob, 0.0);
        EXPECT_LE(l.failure_prob, fc.link_hi);
      }
      EXPECT_GE(t.sat_link_failure_prob, 0.0);
      EXPECT_LE(t.sat_link_failure_prob, fc.sat_hi);
    }
  }
  const Topology a = sample_failures(base, FailureCase::builtin(2), 42);
  EXPECT_EQ(a, sample_failures(base, FailureCase::builtin(2), 42));
  EXPECT_NE(a, sample_failures(base, FailureCase::builtin(2), 43));
  EXPECT_EQ(base, load_topology("Ans"));  // input untouched
}

TEST(NativeJson, RoundTrip) {
  std::mt19937_64 rng(3);
  Topology restricted = with_candidates(load_topology("Sinet"), {1, 4}, {0, 2, 7});
  const std::vector<Topology> cases = {
      sample_failures(load_topology("Nsfnet"), FailureCase::builtin(3), 9),
      fixture::random_topology(9, 6, rng), restricted};
  for (const Topology& t : cases) {
    const nlohmann::json doc = to_json(t);
    EXPECT_EQ(topology_from_json(doc), t);
    EXPECT_EQ(topology_from_json(nlohmann::json::parse(doc.dump())), t);
  }
  EXPECT_EQ(restricted.gateway_candidates(), (std::vector<NodeId>{1, 4}));
  EXPECT_EQ(restricted.controller_candidates(), (std::vector<NodeId>{0, 2, 7}));
}

TEST(Validate, RejectsBrokenTopologies) {
  Topology t = fixture::path_abc();
  EXPECT_NO_THROW(validate(t));
  Topology self = t;
  self.links.push_back(fixture::make_link(1, 1, 1.0));
  self.links.back().v = 1;
  EXPECT_THROW(validate(self), InvalidInput);
  Topology dup = t;
  dup.links.push_back(fixture::make_link(0, 1, 3.0));
  EXPECT_THROW(validate(dup), InvalidInput);
  Topology prob = t;
  prob.nodes[2].failure_prob = 1.0;
  EXPECT_THROW(validate(prob), InvalidInput);
  Topology nocand = t;
  for (Node& n : nocand.nodes) n.gateway_candidate = false;
  EXPECT_THROW(validate(nocand), InvalidInput);
}

TEST(DeriveSeed, DistinctStreams) {
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
}
