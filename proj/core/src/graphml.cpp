#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/format.h>

#include "sagplace/errors.hpp"
#include "sagplace/topology.hpp"

namespace sagplace {

namespace {

namespace pt = boost::property_tree;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// key id -> lower-cased attr.name, one map per domain ("node", "edge", "graph")
using KeyTable = std::map<std::string, std::unordered_map<std::string, std::string>>;

KeyTable read_keys(const pt::ptree& root) {
  KeyTable keys;
  for (const auto& [tag, child] : root) {
    if (tag != "key") continue;
    const std::string id = child.get<std::string>("<xmlattr>.id", "");
    // "attr.name" contains the default path separator.
    const std::string name =
        child.get<std::string>(pt::ptree::path_type("<xmlattr>/attr.name", '/'), id);
    const std::string domain = child.get<std::string>("<xmlattr>.for", "all");
    keys[domain][id] = lower(name);
  }
  return keys;
}

// Attribute values of one element keyed by lower-cased attribute name.
std::unordered_map<std::string, std::string> read_data(const pt::ptree& element,
                                                       const KeyTable& keys,
                                                       const std::string& domain) {
  std::unordered_map<std::string, std::string> out;
  auto lookup = [&](const std::string& dom, const std::string& id) -> std::optional<std::string> {
    auto d = keys.find(dom);
    if (d == keys.end()) return std::nullopt;
    auto k = d->second.find(id);
    if (k == d->second.end()) return std::nullopt;
    return k->second;
  };
  for (const auto& [tag, child] : element) {
    if (tag != "data") continue;
    const std::string id = child.get<std::string>("<xmlattr>.key", "");
    auto name = lookup(domain, id);
    if (!name) name = lookup("all", id);
    out[name.value_or(lower(id))] = child.data();
  }
  return out;
}

std::optional<double> number(const std::unordered_map<std::string, std::string>& data,
                             const std::string& key) {
  auto it = data.find(key);
  if (it == data.end()) return std::nullopt;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

Topology load_graphml(std::string_view document, const GraphmlOptions& options) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(document)};
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw InvalidInput(fmt::format("malformed GraphML: {}", e.what()));
  }
  const auto root_opt = tree.get_child_optional("graphml");
  if (!root_opt) throw InvalidInput("malformed GraphML: missing <graphml> root element");
  const pt::ptree& root = *root_opt;
  const auto graph_opt = root.get_child_optional("graph");
  if (!graph_opt) throw InvalidInput("malformed GraphML: missing <graph> element");
  const pt::ptree& graph = *graph_opt;
  const KeyTable keys = read_keys(root);

  Topology topo;
  topo.sat_hop_delay_ms = options.sat_hop_delay_ms;
  {
    auto gdata = read_data(graph, keys, "graph");
    if (auto it = gdata.find("network"); it != gdata.end()) topo.name = it->second;
  }

  std::unordered_map<std::string, NodeId> index_of;
  for (const auto& [tag, child] : graph) {
    if (tag != "node") continue;
    const std::string xml_id = child.get<std::string>("<xmlattr>.id", "");
    auto data = read_data(child, keys, "node");
    Node node;
    node.id = static_cast<NodeId>(topo.nodes.size());
    auto label = data.find("label");
    node.name = label != data.end() && !label->second.empty() ? label->second : xml_id;
    auto lat = number(data, "latitude");
    auto lon = number(data, "longitude");
    if (!lat || !lon) {
      throw InvalidInput(fmt::format("node '{}' (id {}) has no Latitude/Longitude", node.name,
                                     xml_id));
    }
    node.pos = {*lat, *lon};
    if (!index_of.emplace(xml_id, node.id).second) {
      throw InvalidInput(fmt::format("duplicate node id '{}'", xml_id));
    }
    topo.nodes.push_back(std::move(node));
  }

  // Parallel edges collapse to the shortest one.
  std::map<std::pair<NodeId, NodeId>, double> shortest;
  for (const auto& [tag, child] : graph) {
    if (tag != "edge") continue;
    const std::string src = child.get<std::string>("<xmlattr>.source", "");
    const std::string dst = child.get<std::string>("<xmlattr>.target", "");
    auto s = index_of.find(src);
    auto t = index_of.find(dst);
    if (s == index_of.end() || t == index_of.end()) {
      throw InvalidInput(fmt::format("edge {}-{} references an undeclared node", src, dst));
    }
    if (s->second == t->second) continue;
    auto data = read_data(child, keys, "edge");
    double length = number(data, "length").value_or(
        haversine_km(topo.nodes[s->second].pos, topo.nodes[t->second].pos));
    if (length < 0.0) {
      throw InvalidInput(fmt::format("edge {}-{} has negative length", src, dst));
    }
    auto key = std::minmax(s->second, t->second);
    auto [it, inserted] = shortest.emplace(key, length);
    if (!inserted) it->second = std::min(it->second, length);
  }
  for (const auto& [ends, length] : shortest) {
    Link link;
    link.u = ends.first;
    link.v = ends.second;
    link.length_km = length;
    link.latency_ms = link_latency_ms(length, options.signal_speed_km_per_s);
    topo.links.push_back(link);
  }

  validate(topo);
  return topo;
}

Topology load_graphml_file(const std::filesystem::path& path, const GraphmlOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput(fmt::format("cannot read {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  Topology topo = load_graphml(buf.str(), options);
  if (topo.name.empty()) topo.name = path.stem().string();
  return topo;
}

}  // namespace sagplace
