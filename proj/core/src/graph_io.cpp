#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "lhcd/graph.hpp"

namespace lhcd {

using ordered_json = nlohmann::ordered_json;

std::string to_json(const HierGraph& g) {
  ordered_json j;
  j["nodes"] = ordered_json::array();
  for (NodeId v : g.nodes()) {
    ordered_json n;
    n["id"] = v;
    n["name"] = g.name(v);
    n["kind"] = g.is_measured(v) ? "measured" : "latent";
    j["nodes"].push_back(n);
  }
  j["directed"] = ordered_json::array();
  for (const auto& [f, t] : g.directed_edges()) j["directed"].push_back({f, t});
  j["undirected"] = ordered_json::array();
  for (const auto& [a, b] : g.undirected_edges()) j["undirected"].push_back({a, b});
  j["covers"] = ordered_json::array();
  auto covers = g.covers();
  std::sort(covers.begin(), covers.end());
  for (const auto& c : covers) j["covers"].push_back(c.members);
  return j.dump(2) + "\n";
}

HierGraph graph_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw InputError(std::string("invalid graph JSON: ") + e.what());
  }
  if (!j.contains("nodes") || !j["nodes"].is_array())
    throw InputError("graph JSON: missing \"nodes\" array");
  HierGraph g;
  // Ids must be dense and ascending; names/kinds are taken verbatim.
  std::vector<std::pair<int, ordered_json>> nodes;
  for (const auto& n : j["nodes"]) nodes.emplace_back(n.at("id").get<int>(), n);
  std::sort(nodes.begin(), nodes.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].first != static_cast<int>(i))
      throw InputError("graph JSON: node ids must be dense 0..n-1");
    const auto& n = nodes[i].second;
    std::string kind = n.at("kind").get<std::string>();
    if (kind != "measured" && kind != "latent")
      throw InputError("graph JSON: kind must be measured|latent");
    g.add_node(kind == "measured" ? NodeKind::Measured : NodeKind::Latent,
               n.value("name", ""));
  }
  for (const auto& e : j.value("directed", ordered_json::array())) {
    if (!e.is_array() || e.size() != 2)
      throw InputError("graph JSON: directed edges are [from,to] pairs");
    g.add_edge(e[0].get<int>(), e[1].get<int>());
  }
  for (const auto& e : j.value("undirected", ordered_json::array()))
    g.add_undirected(e[0].get<int>(), e[1].get<int>());
  for (const auto& c : j.value("covers", ordered_json::array())) {
    NodeSet members = c.get<NodeSet>();
    std::sort(members.begin(), members.end());
    g.add_cover(Cover(members));
  }
  if (!g.is_acyclic()) throw InputError("graph JSON: directed part has a cycle");
  return g;
}

std::string to_dot(const HierGraph& g) {
  std::ostringstream os;
  os << "digraph G {\n  rankdir=TB;\n";
  for (NodeId v : g.nodes()) {
    os << "  n" << v << " [label=\"" << g.name(v) << "\"";
    if (g.is_latent(v))
      os << ", shape=ellipse, style=dashed";
    else
      os << ", shape=box";
    os << "];\n";
  }
  for (const auto& [f, t] : g.directed_edges())
    os << "  n" << f << " -> n" << t << ";\n";
  for (const auto& [a, b] : g.undirected_edges())
    os << "  n" << a << " -> n" << b << " [dir=none];\n";
  os << "}\n";
  return os.str();
}

}  // namespace lhcd
