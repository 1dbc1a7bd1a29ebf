#include "sagplace/paths.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <queue>
#include <set>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "sagplace/errors.hpp"

namespace sagplace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNoRow = std::numeric_limits<std::size_t>::max();

struct Tree {
  std::vector<double> dist;
  std::vector<NodeId> parent;
};

// Single-source Dijkstra on the graph minus the masked nodes and links.
Tree dijkstra(const Graph& g, NodeId source, const std::vector<char>* node_blocked = nullptr,
              const std::vector<char>* link_blocked = nullptr) {
  const auto& links = g.topology().links;
  Tree t{std::vector<double>(g.size(), kInf), std::vector<NodeId>(g.size(), kNoParent)};
  std::vector<char> done(g.size(), 0);
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  t.dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (const Graph::Arc& arc : g.neighbors(u)) {
      const NodeId w = arc.to;
      if (done[w]) continue;
      if (node_blocked && (*node_blocked)[w]) continue;
      if (link_blocked && (*link_blocked)[arc.link]) continue;
      const double nd = du + links[arc.link].latency_ms;
      if (nd < t.dist[w]) {
        t.dist[w] = nd;
        t.parent[w] = u;
        heap.emplace(nd, w);
      } else if (nd == t.dist[w] && u < t.parent[w]) {
        t.parent[w] = u;
      }
    }
  }
  return t;
}

std::vector<NodeId> trace(const std::vector<NodeId>& parent, NodeId s, NodeId t) {
  std::vector<NodeId> nodes;
  for (NodeId v = t; v != kNoParent; v = parent[v]) {
    nodes.push_back(v);
    if (v == s) break;
  }
  std::reverse(nodes.begin(), nodes.end());
  return nodes;
}

double latency_of(const Graph& g, const std::vector<NodeId>& nodes) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    auto link = g.link_between(nodes[i], nodes[i + 1]);
    if (!link) {
      throw InvalidInput(fmt::format("nodes {} and {} are not adjacent", nodes[i], nodes[i + 1]));
    }
    sum += g.topology().links[*link].latency_ms;
  }
  return sum;
}

struct PathOrder {
  bool operator()(const Path& a, const Path& b) const {
    if (a.latency_ms != b.latency_ms) return a.latency_ms < b.latency_ms;
    return a.nodes < b.nodes;
  }
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void write_matrix(const std::filesystem::path& file, const Topology& topo,
                  const std::vector<NodeId>& row_ids, const Matrix& m) {
  std::ofstream out(file);
  if (!out) throw InvalidInput(fmt::format("cannot write {}", file.string()));
  out << "node";
  for (const Node& n : topo.nodes) out << ',' << csv_field(n.name);
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << csv_field(topo.nodes[row_ids[r]].name);
    for (std::size_t c = 0; c < m.cols(); ++c) out << ',' << fmt::format("{:.9g}", m(r, c));
    out << '\n';
  }
}

}  // namespace

Graph::Graph(const Topology& topo) : topo_(&topo), adjacency_(topo.size()) {
  for (std::size_t i = 0; i < topo.links.size(); ++i) {
    const Link& l = topo.links[i];
    adjacency_[l.u].push_back({l.v, i});
    adjacency_[l.v].push_back({l.u, i});
  }
  for (auto& arcs : adjacency_) {
    std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.to < b.to; });
  }
}

std::optional<std::size_t> Graph::link_between(NodeId u, NodeId v) const {
  if (u >= adjacency_.size() || v >= adjacency_.size()) return std::nullopt;
  const auto& arcs = adjacency_[u];
  auto it = std::lower_bound(arcs.begin(), arcs.end(), v,
                             [](const Arc& a, NodeId id) { return a.to < id; });
  if (it == arcs.end() || it->to != v) return std::nullopt;
  return it->link;
}

Path ShortestPaths::path(NodeId s, NodeId t) const {
  Path p;
  p.nodes = trace(parent[s], s, t);
  p.latency_ms = latency(s, t);
  return p;
}

ShortestPaths all_pairs_shortest(const Topology& topo) {
  const Graph g(topo);
  ShortestPaths out;
  out.latency = Matrix(topo.size(), topo.size());
  out.parent.resize(topo.size());
  for (NodeId s = 0; s < topo.size(); ++s) {
    Tree t = dijkstra(g, s);
    for (NodeId v = 0; v < topo.size(); ++v) out.latency(s, v) = t.dist[v];
    out.parent[s] = std::move(t.parent);
  }
  return out;
}

std::vector<Path> yen_k_shortest(const Topology& topo, NodeId s, NodeId t, std::size_t k) {
  if (k == 0) throw InvalidInput("k must be at least 1");
  if (s >= topo.size() || t >= topo.size()) throw InvalidInput("path endpoint is not a node");
  if (s == t) return {Path{{s}, 0.0}};

  const Graph g(topo);
  std::vector<Path> accepted;
  {
    Tree first = dijkstra(g, s);
    if (first.dist[t] == kInf) return accepted;
    std::vector<NodeId> nodes = trace(first.parent, s, t);
    accepted.push_back({nodes, latency_of(g, nodes)});
  }

  std::set<Path, PathOrder> candidates;
  std::vector<char> node_blocked(topo.size());
  std::vector<char> link_blocked(topo.links.size());
  while (accepted.size() < k) {
    const std::vector<NodeId> prev = accepted.back().nodes;
    for (std::size_t i = 0; i + 1 < prev.size(); ++i) {
      const NodeId spur = prev[i];
      std::fill(node_blocked.begin(), node_blocked.end(), 0);
      std::fill(link_blocked.begin(), link_blocked.end(), 0);
      for (const Path& p : accepted) {
        if (p.nodes.size() > i + 1 && std::equal(prev.begin(), prev.begin() + i + 1, p.nodes.begin())) {
          link_blocked[*g.link_between(p.nodes[i], p.nodes[i + 1])] = 1;
        }
      }
      for (std::size_t r = 0; r < i; ++r) node_blocked[prev[r]] = 1;

      Tree tail = dijkstra(g, spur, &node_blocked, &link_blocked);
      if (tail.dist[t] == kInf) continue;
      std::vector<NodeId> nodes(prev.begin(), prev.begin() + i);
      auto spur_nodes = trace(tail.parent, spur, t);
      nodes.insert(nodes.end(), spur_nodes.begin(), spur_nodes.end());
      Path candidate{nodes, latency_of(g, nodes)};
      if (std::find(accepted.begin(), accepted.end(), candidate) == accepted.end()) {
        candidates.insert(std::move(candidate));
      }
    }
    if (candidates.empty()) break;
    accepted.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  return accepted;
}

double path_reliability(const Path& path, const Topology& topo, bool include_sat_hop) {
  if (path.nodes.empty()) throw InvalidInput("empty path");
  const Graph g(topo);
  double r = include_sat_hop ? (1.0 - topo.sat_link_failure_prob) : 1.0;
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    const NodeId v = path.nodes[i];
    if (v >= topo.size()) throw InvalidInput(fmt::format("path node {} is not in the topology", v));
    r *= 1.0 - topo.nodes[v].failure_prob;
    if (i + 1 < path.nodes.size()) {
      auto link = g.link_between(v, path.nodes[i + 1]);
      if (!link) {
        throw InvalidInput(fmt::format("nodes {} and {} are not adjacent", v, path.nodes[i + 1]));
      }
      r *= 1.0 - topo.links[*link].failure_prob;
    }
  }
  return r;
}

std::size_t PathTables::gateway_row(NodeId gateway) const {
  if (gateway >= gateway_row_.size() || gateway_row_[gateway] == kNoRow) {
    throw InvalidInput(fmt::format("node {} is not a gateway candidate", gateway));
  }
  return gateway_row_[gateway];
}

std::size_t PathTables::controller_row(NodeId controller) const {
  if (controller >= controller_row_.size() || controller_row_[controller] == kNoRow) {
    throw InvalidInput(fmt::format("node {} is not a controller candidate", controller));
  }
  return controller_row_[controller];
}

PathTables build_reliability_tables(const Topology& topo, std::size_t k_paths) {
  if (k_paths == 0) throw InvalidInput("k_paths must be at least 1");
  const std::size_t n = topo.size();
  const ShortestPaths sp = all_pairs_shortest(topo);

  PathTables t;
  t.k_paths = k_paths;
  t.d = sp.latency;
  t.gateways = topo.gateway_candidates();
  t.controllers = topo.controller_candidates();
  t.gateway_row_.assign(n, kNoRow);
  t.controller_row_.assign(n, kNoRow);
  for (std::size_t r = 0; r < t.gateways.size(); ++r) t.gateway_row_[t.gateways[r]] = r;
  for (std::size_t r = 0; r < t.controllers.size(); ++r) t.controller_row_[t.controllers[r]] = r;
  t.r_sat = Matrix(t.gateways.size(), n);
  t.r_ctl = Matrix(t.controllers.size(), n);

  const double sat_factor = 1.0 - topo.sat_link_failure_prob;
  // Terrestrial best-of-k reliability of v -> facility, cached per pair.
  auto terrestrial = [&](NodeId v, NodeId facility) {
    if (k_paths == 1) return path_reliability(sp.path(v, facility), topo, false);
    double best = 0.0;
    for (const Path& p : yen_k_shortest(topo, v, facility, k_paths)) {
      best = std::max(best, path_reliability(p, topo, false));
    }
    return best;
  };
  Matrix cache(n, n, -1.0);
  auto cached = [&](NodeId v, NodeId facility) {
    double& slot = cache(v, facility);
    if (slot < 0.0) slot = terrestrial(v, facility);
    return slot;
  };
  for (std::size_t r = 0; r < t.gateways.size(); ++r) {
    for (NodeId v = 0; v < n; ++v) t.r_sat(r, v) = sat_factor * cached(v, t.gateways[r]);
  }
  for (std::size_t r = 0; r < t.controllers.size(); ++r) {
    for (NodeId v = 0; v < n; ++v) t.r_ctl(r, v) = cached(v, t.controllers[r]);
  }
  return t;
}

void dump_tables_csv(const Topology& topo, const PathTables& tables,
                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<NodeId> all(topo.size());
  for (NodeId i = 0; i < all.size(); ++i) all[i] = i;
  write_matrix(dir / "latency.csv", topo, all, tables.d);
  write_matrix(dir / "r_sat.csv", topo, tables.gateways, tables.r_sat);
  write_matrix(dir / "r_ctl.csv", topo, tables.controllers, tables.r_ctl);
}

}  // namespace sagplace
