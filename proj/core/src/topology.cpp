#include "sagplace/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <utility>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "sagplace/errors.hpp"

namespace sagplace {

namespace {

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p < 1.0; }

// Connected components as lists of node ids, each sorted, ordered by first id.
std::vector<std::vector<NodeId>> components(const Topology& topo) {
  std::vector<NodeId> parent(topo.size());
  for (NodeId i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](NodeId x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const Link& l : topo.links) {
    NodeId a = find(l.u), b = find(l.v);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::vector<NodeId>> groups(topo.size());
  for (NodeId i = 0; i < parent.size(); ++i) groups[find(i)].push_back(i);
  std::erase_if(groups, [](const auto& g) { return g.empty(); });
  return groups;
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("SAGPLACE_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
#ifdef SAGPLACE_DATA_DIR
  if (std::filesystem::is_directory(SAGPLACE_DATA_DIR)) return SAGPLACE_DATA_DIR;
#endif
#ifdef SAGPLACE_INSTALLED_DATA_DIR
  if (std::filesystem::is_directory(SAGPLACE_INSTALLED_DATA_DIR)) return SAGPLACE_INSTALLED_DATA_DIR;
#endif
  return "data/topologies";
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

std::vector<NodeId> Topology::gateway_candidates() const {
  std::vector<NodeId> out;
  for (const Node& n : nodes) {
    if (n.gateway_candidate) out.push_back(n.id);
  }
  return out;
}

std::vector<NodeId> Topology::controller_candidates() const {
  std::vector<NodeId> out;
  for (const Node& n : nodes) {
    if (n.controller_candidate) out.push_back(n.id);
  }
  return out;
}

FailureCase FailureCase::builtin(int id) {
  switch (id) {
    case 1: return {1, 0.05, 0.02, 0.02};
    case 2: return {2, 0.06, 0.04, 0.03};
    case 3: return {3, 0.07, 0.06, 0.04};
    case 4: return {4, 0.08, 0.08, 0.05};
    default: throw InvalidInput(fmt::format("failure case must be 1..4, got {}", id));
  }
}

double haversine_km(GeoPoint a, GeoPoint b) {
  const double lat1 = deg2rad(a.lat_deg);
  const double lat2 = deg2rad(b.lat_deg);
  const double dlat = lat2 - lat1;
  const double dlon = deg2rad(b.lon_deg - a.lon_deg);
  const double s_lat = std::sin(dlat / 2.0);
  const double s_lon = std::sin(dlon / 2.0);
  const double h = s_lat * s_lat + std::cos(lat1) * std::cos(lat2) * s_lon * s_lon;
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0)));
}

double link_latency_ms(double length_km, double speed_km_per_s) {
  if (!(length_km >= 0.0) || !std::isfinite(length_km)) {
    throw InvalidInput(fmt::format("link length must be a non-negative number, got {}", length_km));
  }
  if (!(speed_km_per_s > 0.0)) {
    throw InvalidInput(fmt::format("signal speed must be positive, got {}", speed_km_per_s));
  }
  return length_km / speed_km_per_s * 1000.0;
}

void validate(const Topology& topo) {
  if (topo.nodes.empty()) throw InvalidInput("topology has no nodes");
  for (std::size_t i = 0; i < topo.nodes.size(); ++i) {
    const Node& n = topo.nodes[i];
    if (n.id != i) {
      throw InvalidInput(fmt::format("node ids must be 0..{} in order; position {} has id {}",
                                     topo.size() - 1, i, n.id));
    }
    if (!(std::abs(n.pos.lat_deg) <= 90.0) || !(std::abs(n.pos.lon_deg) <= 180.0)) {
      throw InvalidInput(fmt::format("node '{}' has coordinates out of range", n.name));
    }
    if (!is_probability(n.failure_prob)) {
      throw InvalidInput(fmt::format("node '{}' failure probability {} not in [0,1)", n.name,
                                     n.failure_prob));
    }
  }
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const Link& l : topo.links) {
    if (l.u >= topo.size() || l.v >= topo.size()) {
      throw InvalidInput(fmt::format("link {}-{} references an unknown node", l.u, l.v));
    }
    if (l.u == l.v) throw InvalidInput(fmt::format("self-loop at node {}", l.u));
    if (!seen.emplace(std::min(l.u, l.v), std::max(l.u, l.v)).second) {
      throw InvalidInput(fmt::format("duplicate link {}-{}", l.u, l.v));
    }
    if (!(l.length_km >= 0.0) || !(l.latency_ms >= 0.0) || !std::isfinite(l.latency_ms)) {
      throw InvalidInput(fmt::format("link {}-{} has a negative length or latency", l.u, l.v));
    }
    if (!is_probability(l.failure_prob)) {
      throw InvalidInput(fmt::format("link {}-{} failure probability {} not in [0,1)", l.u, l.v,
                                     l.failure_prob));
    }
  }
  if (!is_probability(topo.sat_link_failure_prob)) {
    throw InvalidInput("satellite link failure probability not in [0,1)");
  }
  if (!(topo.sat_hop_delay_ms >= 0.0) || !std::isfinite(topo.sat_hop_delay_ms)) {
    throw InvalidInput("satellite hop delay must be non-negative");
  }
  if (topo.gateway_candidates().empty()) throw InvalidInput("gateway candidate set is empty");
  if (topo.controller_candidates().empty()) throw InvalidInput("controller candidate set is empty");

  auto groups = components(topo);
  if (groups.size() > 1) {
    std::ostringstream msg;
    msg << "topology '" << topo.name << "' is disconnected (" << groups.size() << " components):";
    for (const auto& g : groups) {
      msg << " {";
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (i == 8) {
          msg << ", ... +" << (g.size() - 8);
          break;
        }
        msg << (i ? ", " : "") << topo.nodes[g[i]].name;
      }
      msg << '}';
    }
    throw InvalidInput(msg.str());
  }
}

Topology sample_failures(const Topology& topo, const FailureCase& failure_case,
                         std::uint64_t seed) {
  Topology out = topo;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> node_p(0.0, failure_case.node_hi);
  std::uniform_real_distribution<double> link_p(0.0, failure_case.link_hi);
  std::uniform_real_distribution<double> sat_p(0.0, failure_case.sat_hi);
  for (Node& n : out.nodes) n.failure_prob = node_p(rng);
  for (Link& l : out.links) l.failure_prob = link_p(rng);
  out.sat_link_failure_prob = sat_p(rng);
  return out;
}

Topology with_candidates(Topology topo, const std::vector<NodeId>& gateways,
                         const std::vector<NodeId>& controllers) {
  auto apply = [&](const std::vector<NodeId>& ids, bool Node::*flag) {
    if (ids.empty()) return;
    for (Node& n : topo.nodes) n.*flag = false;
    for (NodeId id : ids) {
      if (id >= topo.size()) throw InvalidInput(fmt::format("candidate {} is not a node", id));
      topo.nodes[id].*flag = true;
    }
  };
  apply(gateways, &Node::gateway_candidate);
  apply(controllers, &Node::controller_candidate);
  return topo;
}

nlohmann::json to_json(const Topology& topo) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const Node& n : topo.nodes) {
    nodes.push_back({{"id", n.id},
                     {"name", n.name},
                     {"lat", n.pos.lat_deg},
                     {"lon", n.pos.lon_deg},
                     {"gw", n.gateway_candidate},
                     {"ctl", n.controller_candidate},
                     {"p", n.failure_prob}});
  }
  nlohmann::json links = nlohmann::json::array();
  for (const Link& l : topo.links) {
    links.push_back({{"u", l.u},
                     {"v", l.v},
                     {"len_km", l.length_km},
                     {"lat_ms", l.latency_ms},
                     {"p", l.failure_prob}});
  }
  return {{"name", topo.name},
          {"nodes", std::move(nodes)},
          {"links", std::move(links)},
          {"sat", {{"p", topo.sat_link_failure_prob}, {"delay_ms", topo.sat_hop_delay_ms}}}};
}

Topology topology_from_json(const nlohmann::json& doc) {
  Topology topo;
  try {
    topo.name = doc.value("name", std::string{});
    for (const auto& n : doc.at("nodes")) {
      Node node;
      node.id = n.at("id").get<NodeId>();
      node.name = n.value("name", fmt::format("n{}", node.id));
      node.pos = {n.at("lat").get<double>(), n.at("lon").get<double>()};
      node.gateway_candidate = n.value("gw", true);
      node.controller_candidate = n.value("ctl", true);
      node.failure_prob = n.value("p", 0.0);
      topo.nodes.push_back(std::move(node));
    }
    for (const auto& l : doc.at("links")) {
      Link link;
      link.u = l.at("u").get<NodeId>();
      link.v = l.at("v").get<NodeId>();
      link.length_km = l.at("len_km").get<double>();
      link.latency_ms = l.contains("lat_ms") ? l.at("lat_ms").get<double>()
                                             : link_latency_ms(link.length_km);
      link.failure_prob = l.value("p", 0.0);
      topo.links.push_back(link);
    }
    if (doc.contains("sat")) {
      topo.sat_link_failure_prob = doc.at("sat").value("p", 0.0);
      topo.sat_hop_delay_ms = doc.at("sat").value("delay_ms", kGeoHopDelayMs);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(fmt::format("malformed topology JSON: {}", e.what()));
  }
  validate(topo);
  return topo;
}

std::vector<std::string> bundled_topologies() {
  return {"Nsfnet", "Sinet", "Ans", "Aarnet", "Agis", "Digex", "Chinanet", "Bellcanada", "Tinet"};
}

Topology load_topology(const std::string& name_or_path, const GraphmlOptions& options) {
  std::filesystem::path path = name_or_path;
  if (!std::filesystem::exists(path)) {
    std::string key = lower(name_or_path);
    std::erase(key, ' ');
    path = data_dir() / (key + ".graphml");
    if (!std::filesystem::exists(path)) {
      throw InvalidInput(fmt::format("unknown topology '{}' (not a file, not a bundled name)",
                                     name_or_path));
    }
  }
  if (path.extension() == ".json") {
    std::ifstream in(path);
    if (!in) throw InvalidInput(fmt::format("cannot read {}", path.string()));
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(fmt::format("malformed JSON in {}: {}", path.string(), e.what()));
    }
    return topology_from_json(doc);
  }
  return load_graphml_file(path, options);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 finalizer over the combined state
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace sagplace
