#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace sagplace {

using NodeId = std::uint32_t;

inline constexpr double kEarthRadiusKm = 6371.0;
/// Propagation speed in fiber, roughly two thirds of c.
inline constexpr double kFiberSpeedKmPerS = 200000.0;
/// One-way ground-to-GEO hop.
inline constexpr double kGeoHopDelayMs = 125.0;

struct GeoPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct Node {
  NodeId id = 0;
  std::string name;
  GeoPoint pos;
  bool gateway_candidate = true;
  bool controller_candidate = true;
  double failure_prob = 0.0;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Link {
  NodeId u = 0;
  NodeId v = 0;
  double length_km = 0.0;
  double latency_ms = 0.0;
  double failure_prob = 0.0;

  friend bool operator==(const Link&, const Link&) = default;
};

/// Terrestrial graph plus the single satellite hop shared by every gateway.
///
/// Immutable once validated; every operation that changes failure
/// probabilities returns a new value.
struct Topology {
  std::string name;
  std::vector<Node> nodes;
  std::vector<Link> links;
  double sat_link_failure_prob = 0.0;
  double sat_hop_delay_ms = kGeoHopDelayMs;

  std::size_t size() const noexcept { return nodes.size(); }
  std::vector<NodeId> gateway_candidates() const;
  std::vector<NodeId> controller_candidates() const;

  friend bool operator==(const Topology&, const Topology&) = default;
};

/// Upper bounds of the uniform failure-probability draws. Lower bounds are 0.
struct FailureCase {
  int id = 1;
  double node_hi = 0.0;
  double link_hi = 0.0;
  double sat_hi = 0.0;

  /// Built-in cases 1..4. Throws InvalidInput for any other id.
  static FailureCase builtin(int id);
};

/// Great-circle distance on a sphere of radius kEarthRadiusKm.
double haversine_km(GeoPoint a, GeoPoint b);

/// Propagation delay of a fiber run. Throws InvalidInput on negative length.
double link_latency_ms(double length_km, double speed_km_per_s = kFiberSpeedKmPerS);

/// Throws InvalidInput unless ids are dense, probabilities lie in [0,1),
/// links are simple and non-negative, the graph is connected and both
/// candidate sets are non-empty.
void validate(const Topology& topo);

struct GraphmlOptions {
  double signal_speed_km_per_s = kFiberSpeedKmPerS;
  double sat_hop_delay_ms = kGeoHopDelayMs;
};

/// Parses a Topology Zoo style GraphML document. Node ids follow document
/// order; link length comes from an edge `length` attribute when present and
/// from the haversine distance of the endpoints otherwise.
Topology load_graphml(std::string_view document, const GraphmlOptions& options = {});
Topology load_graphml_file(const std::filesystem::path& path, const GraphmlOptions& options = {});

/// Draws every failure probability uniformly from the case's ranges.
Topology sample_failures(const Topology& topo, const FailureCase& failure_case, std::uint64_t seed);

/// Restricts the candidate sets. Empty lists leave the corresponding set untouched.
Topology with_candidates(Topology topo, const std::vector<NodeId>& gateways,
                         const std::vector<NodeId>& controllers);

// Native JSON: {nodes:[{id,name,lat,lon,gw,ctl,p}], links:[{u,v,len_km,lat_ms,p}], sat:{p,delay_ms}}
nlohmann::json to_json(const Topology& topo);
Topology topology_from_json(const nlohmann::json& doc);

/// Resolves a bundled fixture name ("Nsfnet", "tinet", ...) or a file path
/// (.graphml or .json).
Topology load_topology(const std::string& name_or_path, const GraphmlOptions& options = {});

/// Names of the bundled fixtures, ordered by node count.
std::vector<std::string> bundled_topologies();

/// Mixes a master seed and a stream index into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace sagplace
