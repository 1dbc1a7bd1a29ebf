#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sagplace/topology.hpp"

namespace sagplace {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Path {
  std::vector<NodeId> nodes;
  double latency_ms = 0.0;

  friend bool operator==(const Path&, const Path&) = default;
};

/// Adjacency view of a topology with link lookup by endpoint pair.
class Graph {
 public:
  struct Arc {
    NodeId to;
    std::size_t link;
  };

  explicit Graph(const Topology& topo);

  std::size_t size() const noexcept { return adjacency_.size(); }
  std::span<const Arc> neighbors(NodeId u) const { return adjacency_[u]; }
  std::optional<std::size_t> link_between(NodeId u, NodeId v) const;
  const Topology& topology() const noexcept { return *topo_; }

 private:
  const Topology* topo_;
  std::vector<std::vector<Arc>> adjacency_;  // sorted by neighbor id
};

inline constexpr NodeId kNoParent = std::numeric_limits<NodeId>::max();

/// Dijkstra trees from every source.
struct ShortestPaths {
  Matrix latency;                           // latency(s, t) in ms
  std::vector<std::vector<NodeId>> parent;  // parent[s][t]; kNoParent at the root

  /// Path s -> t read off the tree rooted at s.
  Path path(NodeId s, NodeId t) const;
};

/// Exact latencies by Dijkstra from every source. On equal tentative
/// distances the lower-id predecessor wins.
ShortestPaths all_pairs_shortest(const Topology& topo);

/// Up to k loopless s -> t paths in non-decreasing latency (ties by node
/// sequence). The first is the Dijkstra path. s == t yields the single
/// zero-length path. Throws InvalidInput when k == 0.
std::vector<Path> yen_k_shortest(const Topology& topo, NodeId s, NodeId t, std::size_t k);

/// Product of (1 - p) over every link and every node on the path, both
/// endpoints included, times (1 - p_sat) when include_sat_hop is set.
double path_reliability(const Path& path, const Topology& topo, bool include_sat_hop);

/// Latency and reliability tables consumed by every objective.
///
/// Reliability rows are indexed by position in the candidate list
/// (`gateways` / `controllers`), columns by node id.
struct PathTables {
  Matrix d;
  std::vector<NodeId> gateways;
  std::vector<NodeId> controllers;
  Matrix r_sat;
  Matrix r_ctl;
  std::size_t k_paths = 1;

  std::size_t nodes() const noexcept { return d.rows(); }
  double latency(NodeId u, NodeId v) const { return d(u, v); }
  /// Row of `gateway` in r_sat. Throws InvalidInput if it is not a candidate.
  std::size_t gateway_row(NodeId gateway) const;
  std::size_t controller_row(NodeId controller) const;
  double sat_reliability(NodeId gateway, NodeId v) const { return r_sat(gateway_row(gateway), v); }
  double ctl_reliability(NodeId controller, NodeId v) const {
    return r_ctl(controller_row(controller), v);
  }

 private:
  friend PathTables build_reliability_tables(const Topology&, std::size_t);
  std::vector<std::size_t> gateway_row_;     // node id -> row, npos when not a candidate
  std::vector<std::size_t> controller_row_;
};

/// r_sat(j, v) / r_ctl(k, v) are the best reliabilities among the k_paths
/// latency-shortest v -> facility paths; k_paths = 1 uses the shortest path.
PathTables build_reliability_tables(const Topology& topo, std::size_t k_paths = 1);

/// Writes latency.csv, r_sat.csv and r_ctl.csv under `dir`, headed by node names.
void dump_tables_csv(const Topology& topo, const PathTables& tables,
                     const std::filesystem::path& dir);

}  // namespace sagplace
