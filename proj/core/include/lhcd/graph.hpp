#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lhcd/errors.hpp"

namespace lhcd {

using NodeId = int;

enum class NodeKind : std::uint8_t { Measured, Latent };

enum class Relation { Parents, Children, Descendants, Siblings, Grandparents };

// Sorted set of node ids. All set-valued queries return this form.
using NodeSet = std::vector<NodeId>;

NodeSet set_union(const NodeSet& a, const NodeSet& b);
NodeSet set_difference(const NodeSet& a, const NodeSet& b);
NodeSet set_intersection(const NodeSet& a, const NodeSet& b);
bool set_contains(const NodeSet& s, NodeId v);
bool is_subset(const NodeSet& a, const NodeSet& b);
void set_insert(NodeSet& s, NodeId v);

// A latent atomic cover: an ordered nonempty set of latent node ids
// treated as a single unit during search.
struct Cover {
  NodeSet members;

  Cover() = default;
  explicit Cover(NodeSet m) : members(std::move(m)) {}

  int size() const { return static_cast<int>(members.size()); }
  bool operator==(const Cover& o) const { return members == o.members; }
  bool operator<(const Cover& o) const { return members < o.members; }
};

// One element of an active search set: a single measured node or a Cover.
struct SetElement {
  // Exactly one of the two is populated.
  std::optional<NodeId> measured;
  std::optional<Cover> cover;

  static SetElement make_measured(NodeId v) {
    SetElement e;
    e.measured = v;
    return e;
  }
  static SetElement make_cover(Cover c) {
    SetElement e;
    e.cover = std::move(c);
    return e;
  }

  bool is_measured() const { return measured.has_value(); }
  // Variables contributed by this element (the measured node itself, or the
  // cover's latent members).
  NodeSet variables() const;
  bool operator==(const SetElement& o) const;
  bool operator<(const SetElement& o) const;
};

using ElementSet = std::vector<SetElement>;

// |S| and ||S||: element count and size of the union of member variables.
std::pair<int, int> set_size(const ElementSet& s);
NodeSet element_variables(const ElementSet& s);

struct Il2hViolation {
  int clause = 0;  // 1, 2 or 3
  std::string detail;
};

// Mixed graph over measured and latent nodes. The directed part is a DAG;
// undirected edges appear only after conversion to equivalence-class form.
// Cover annotations group latent nodes that were introduced (or declared)
// as one unit.
class HierGraph {
 public:
  HierGraph() = default;

  NodeId add_node(NodeKind kind, std::string name = "");
  void add_edge(NodeId from, NodeId to);
  void remove_edge(NodeId from, NodeId to);
  bool has_edge(NodeId from, NodeId to) const;
  void add_undirected(NodeId a, NodeId b);
  void remove_undirected(NodeId a, NodeId b);
  bool has_undirected(NodeId a, NodeId b) const;

  void add_cover(Cover c);
  void remove_cover(const Cover& c);
  // Removes a node together with its edges and any cover containing it.
  void remove_node(NodeId v);

  int node_count() const { return static_cast<int>(kinds_.size()); }
  NodeKind kind(NodeId v) const;
  bool is_measured(NodeId v) const { return kind(v) == NodeKind::Measured; }
  bool is_latent(NodeId v) const { return kind(v) == NodeKind::Latent; }
  const std::string& name(NodeId v) const;
  void set_name(NodeId v, std::string name);

  // Node ids, ascending. Removed nodes are skipped.
  NodeSet nodes() const;
  NodeSet measured_nodes() const;
  NodeSet latent_nodes() const;
  bool alive(NodeId v) const;

  const NodeSet& parents(NodeId v) const;
  const NodeSet& children(NodeId v) const;
  NodeSet undirected_neighbors(NodeId v) const;
  // Neighbors over both edge kinds.
  NodeSet adjacent(NodeId v) const;

  std::vector<std::pair<NodeId, NodeId>> directed_edges() const;
  std::vector<std::pair<NodeId, NodeId>> undirected_edges() const;

  const std::vector<Cover>& covers() const { return covers_; }
  // The cover containing latent node v, if annotated.
  std::optional<Cover> cover_of(NodeId v) const;

  bool is_acyclic() const;
  // Throws InputError when an id is unknown or removed.
  void check_node(NodeId v) const;

  // Topological order over directed edges (alive nodes only).
  NodeSet topological_order() const;

  bool operator==(const HierGraph& o) const;

 private:
  std::vector<NodeKind> kinds_;
  std::vector<std::string> names_;
  std::vector<bool> alive_;
  std::vector<NodeSet> parents_;
  std::vector<NodeSet> children_;
  std::vector<std::pair<NodeId, NodeId>> undirected_;  // ordered (min,max)
  std::vector<Cover> covers_;
};

// Pa/Ch/PDe/Sib/Gp closure queries of the notation table.
NodeSet relatives(const HierGraph& g, const NodeSet& v, Relation relation);

// All nodes outside `l` whose parent set is nonempty and contained in `l`.
// This is the membership reading under which the pure children of a set
// need not be fully connected to every member.
NodeSet pure_children(const HierGraph& g, const NodeSet& l);

// Recursive pure-children closure (latent and measured).
NodeSet pure_descendants(const HierGraph& g, const NodeSet& l);

// Measured pure descendants of a set of elements; a measured element maps
// to itself.
NodeSet measured_pure_descendants(const HierGraph& g, const ElementSet& v);
NodeSet measured_pure_descendants(const HierGraph& g, const NodeSet& l);

// Collapsing count of a latent set's pure children: repeatedly replace,
// for j = 1..|l|-1, the largest pure-children subset with exactly j
// parents by j scratch pseudo-latents, then report the final count.
// Pseudo-latents never enter the graph.
int effective_cardinality(const HierGraph& g, const Cover& l);
int effective_cardinality_of(const HierGraph& g, const Cover& l,
                             const NodeSet& children_subset);

// Definition of a discoverable latent unit: enough effective pure children,
// a disjoint neighbor set of size |l|+1, and no partition of l that
// satisfies both requirements while splitting the pure children exactly.
bool is_latent_atomic_cover(const HierGraph& g, const Cover& l);

struct Il2hOptions {
  int max_cover_size = 4;  // cap for atomic-cover enumeration
};

// Structural validation of the three identifiability clauses. Violations
// are data, not errors; an empty list means the graph qualifies.
std::vector<Il2hViolation> validate_il2h(const HierGraph& g,
                                         const Il2hOptions& opt = {});

// JSON schema: {"nodes":[{"id":..,"name":..,"kind":..}],"directed":[[f,t]..],
// "undirected":[[a,b]..],"covers":[[ids..]..]}
std::string to_json(const HierGraph& g);
HierGraph graph_from_json(const std::string& text);
std::string to_dot(const HierGraph& g);

}  // namespace lhcd
