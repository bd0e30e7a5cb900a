#include "lhcd/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace lhcd {

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

NodeSet set_difference(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

NodeSet set_intersection(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool set_contains(const NodeSet& s, NodeId v) {
  return std::binary_search(s.begin(), s.end(), v);
}

bool is_subset(const NodeSet& a, const NodeSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

void set_insert(NodeSet& s, NodeId v) {
  auto it = std::lower_bound(s.begin(), s.end(), v);
  if (it == s.end() || *it != v) s.insert(it, v);
}

NodeSet SetElement::variables() const {
  if (measured) return {*measured};
  return cover->members;
}

bool SetElement::operator==(const SetElement& o) const {
  return measured == o.measured && cover == o.cover;
}

bool SetElement::operator<(const SetElement& o) const {
  return variables() < o.variables();
}

std::pair<int, int> set_size(const ElementSet& s) {
  return {static_cast<int>(s.size()),
          static_cast<int>(element_variables(s).size())};
}

NodeSet element_variables(const ElementSet& s) {
  NodeSet all;
  for (const auto& e : s) all = set_union(all, e.variables());
  return all;
}

NodeId HierGraph::add_node(NodeKind kind, std::string name) {
  NodeId id = static_cast<NodeId>(kinds_.size());
  kinds_.push_back(kind);
  if (name.empty())
    name = (kind == NodeKind::Measured ? "X" : "L") + std::to_string(id);
  names_.push_back(std::move(name));
  alive_.push_back(true);
  parents_.emplace_back();
  children_.emplace_back();
  return id;
}

void HierGraph::check_node(NodeId v) const {
  if (v < 0 || v >= node_count() || !alive_[v])
    throw InputError("unknown node id " + std::to_string(v));
}

void HierGraph::add_edge(NodeId from, NodeId to) {
  check_node(from);
  check_node(to);
  if (is_measured(from))
    throw InputError("measured node " + names_[from] + " cannot have outgoing edges");
  set_insert(children_[from], to);
  set_insert(parents_[to], from);
}

void HierGraph::remove_edge(NodeId from, NodeId to) {
  auto erase = [](NodeSet& s, NodeId v) {
    auto it = std::lower_bound(s.begin(), s.end(), v);
    if (it != s.end() && *it == v) s.erase(it);
  };
  erase(children_[from], to);
  erase(parents_[to], from);
}

bool HierGraph::has_edge(NodeId from, NodeId to) const {
  return from >= 0 && from < node_count() && set_contains(children_[from], to);
}

void HierGraph::add_undirected(NodeId a, NodeId b) {
  check_node(a);
  check_node(b);
  auto e = std::minmax(a, b);
  std::pair<NodeId, NodeId> p{e.first, e.second};
  if (std::find(undirected_.begin(), undirected_.end(), p) == undirected_.end())
    undirected_.push_back(p);
}

void HierGraph::remove_undirected(NodeId a, NodeId b) {
  auto e = std::minmax(a, b);
  std::pair<NodeId, NodeId> p{e.first, e.second};
  undirected_.erase(std::remove(undirected_.begin(), undirected_.end(), p),
                    undirected_.end());
}

bool HierGraph::has_undirected(NodeId a, NodeId b) const {
  auto e = std::minmax(a, b);
  return std::find(undirected_.begin(), undirected_.end(),
                   std::pair<NodeId, NodeId>{e.first, e.second}) != undirected_.end();
}

void HierGraph::add_cover(Cover c) {
  for (NodeId v : c.members) {
    check_node(v);
    if (!is_latent(v))
      throw InputError("cover member " + names_[v] + " is not latent");
  }
  if (c.members.empty()) throw InputError("empty cover");
  if (std::find(covers_.begin(), covers_.end(), c) == covers_.end())
    covers_.push_back(std::move(c));
}

void HierGraph::remove_cover(const Cover& c) {
  covers_.erase(std::remove(covers_.begin(), covers_.end(), c), covers_.end());
}

void HierGraph::remove_node(NodeId v) {
  check_node(v);
  for (NodeId p : NodeSet(parents_[v])) remove_edge(p, v);
  for (NodeId c : NodeSet(children_[v])) remove_edge(v, c);
  undirected_.erase(std::remove_if(undirected_.begin(), undirected_.end(),
                                   [&](const auto& e) {
                                     return e.first == v || e.second == v;
                                   }),
                    undirected_.end());
  covers_.erase(std::remove_if(covers_.begin(), covers_.end(),
                               [&](const Cover& c) {
                                 return set_contains(c.members, v);
                               }),
                covers_.end());
  alive_[v] = false;
}

NodeKind HierGraph::kind(NodeId v) const {
  check_node(v);
  return kinds_[v];
}

const std::string& HierGraph::name(NodeId v) const {
  check_node(v);
  return names_[v];
}

void HierGraph::set_name(NodeId v, std::string name) {
  check_node(v);
  names_[v] = std::move(name);
}

bool HierGraph::alive(NodeId v) const {
  return v >= 0 && v < node_count() && alive_[v];
}

NodeSet HierGraph::nodes() const {
  NodeSet out;
  for (NodeId v = 0; v < node_count(); ++v)
    if (alive_[v]) out.push_back(v);
  return out;
}

NodeSet HierGraph::measured_nodes() const {
  NodeSet out;
  for (NodeId v = 0; v < node_count(); ++v)
    if (alive_[v] && kinds_[v] == NodeKind::Measured) out.push_back(v);
  return out;
}

NodeSet HierGraph::latent_nodes() const {
  NodeSet out;
  for (NodeId v = 0; v < node_count(); ++v)
    if (alive_[v] && kinds_[v] == NodeKind::Latent) out.push_back(v);
  return out;
}

const NodeSet& HierGraph::parents(NodeId v) const {
  check_node(v);
  return parents_[v];
}

const NodeSet& HierGraph::children(NodeId v) const {
  check_node(v);
  return children_[v];
}

NodeSet HierGraph::undirected_neighbors(NodeId v) const {
  NodeSet out;
  for (const auto& [a, b] : undirected_) {
    if (a == v) set_insert(out, b);
    if (b == v) set_insert(out, a);
  }
  return out;
}

NodeSet HierGraph::adjacent(NodeId v) const {
  NodeSet out = set_union(parents(v), children(v));
  return set_union(out, undirected_neighbors(v));
}

std::vector<std::pair<NodeId, NodeId>> HierGraph::directed_edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId v = 0; v < node_count(); ++v)
    if (alive_[v])
      for (NodeId c : children_[v]) out.emplace_back(v, c);
  return out;
}

std::vector<std::pair<NodeId, NodeId>> HierGraph::undirected_edges() const {
  auto out = undirected_;
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<Cover> HierGraph::cover_of(NodeId v) const {
  for (const auto& c : covers_)
    if (set_contains(c.members, v)) return c;
  return std::nullopt;
}

bool HierGraph::is_acyclic() const {
  return static_cast<int>(topological_order().size()) ==
         static_cast<int>(nodes().size());
}

NodeSet HierGraph::topological_order() const {
  std::vector<int> indeg(node_count(), 0);
  for (NodeId v : nodes()) indeg[v] = static_cast<int>(parents_[v].size());
  std::deque<NodeId> q;
  for (NodeId v : nodes())
    if (indeg[v] == 0) q.push_back(v);
  NodeSet order;
  while (!q.empty()) {
    NodeId v = q.front();
    q.pop_front();
    order.push_back(v);
    for (NodeId c : children_[v])
      if (--indeg[c] == 0) q.push_back(c);
  }
  return order;
}

bool HierGraph::operator==(const HierGraph& o) const {
  if (nodes() != o.nodes()) return false;
  for (NodeId v : nodes()) {
    if (kinds_[v] != o.kinds_[v]) return false;
    if (parents_[v] != o.parents_[v]) return false;
  }
  auto u1 = undirected_edges();
  auto u2 = o.undirected_edges();
  if (u1 != u2) return false;
  auto c1 = covers_;
  auto c2 = o.covers_;
  std::sort(c1.begin(), c1.end());
  std::sort(c2.begin(), c2.end());
  return c1 == c2;
}

NodeSet relatives(const HierGraph& g, const NodeSet& v, Relation relation) {
  for (NodeId x : v) g.check_node(x);
  NodeSet out;
  switch (relation) {
    case Relation::Parents:
      for (NodeId x : v) out = set_union(out, g.parents(x));
      break;
    case Relation::Children:
      for (NodeId x : v) out = set_union(out, g.children(x));
      break;
    case Relation::Descendants: {
      std::deque<NodeId> q(v.begin(), v.end());
      NodeSet seen;
      while (!q.empty()) {
        NodeId x = q.front();
        q.pop_front();
        for (NodeId c : g.children(x))
          if (!set_contains(seen, c)) {
            set_insert(seen, c);
            q.push_back(c);
          }
      }
      out = seen;
      break;
    }
    case Relation::Siblings: {
      NodeSet pa = relatives(g, v, Relation::Parents);
      out = set_difference(relatives(g, pa, Relation::Children), v);
      break;
    }
    case Relation::Grandparents: {
      NodeSet pa = relatives(g, v, Relation::Parents);
      out = relatives(g, pa, Relation::Parents);
      break;
    }
  }
  return out;
}

NodeSet pure_children(const HierGraph& g, const NodeSet& l) {
  for (NodeId x : l) g.check_node(x);
  NodeSet out;
  for (NodeId v : g.nodes()) {
    if (set_contains(l, v)) continue;
    const NodeSet& pa = g.parents(v);
    if (!pa.empty() && is_subset(pa, l)) out.push_back(v);
  }
  return out;
}

NodeSet pure_descendants(const HierGraph& g, const NodeSet& l) {
  NodeSet frontier = l;
  NodeSet seen;
  while (true) {
    NodeSet next = pure_children(g, set_union(frontier, seen));
    next = set_difference(next, seen);
    if (next.empty()) break;
    seen = set_union(seen, next);
  }
  return set_difference(seen, l);
}

NodeSet measured_pure_descendants(const HierGraph& g, const NodeSet& l) {
  NodeSet out;
  for (NodeId v : pure_descendants(g, l))
    if (g.is_measured(v)) out.push_back(v);
  return out;
}

NodeSet measured_pure_descendants(const HierGraph& g, const ElementSet& v) {
  NodeSet out;
  for (const auto& e : v) {
    if (e.is_measured()) {
      set_insert(out, *e.measured);
    } else {
      out = set_union(out, measured_pure_descendants(g, e.cover->members));
    }
  }
  return out;
}

namespace {

// Working item of the collapsing loop: a real child node or a scratch
// pseudo-latent, identified by id with its recorded parent set.
struct EffItem {
  int id;         // real node id, or synthetic (>= n) for pseudo-latents
  NodeSet parents;
};

// Enumerate subsets of `universe` of size k, invoking fn on each.
template <typename Fn>
void for_each_subset_of_size(const NodeSet& universe, int k, Fn&& fn) {
  int n = static_cast<int>(universe.size());
  if (k > n || k < 0) return;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    NodeSet sub;
    sub.reserve(k);
    for (int i : idx) sub.push_back(universe[i]);
    fn(sub);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

int effective_cardinality_items(const HierGraph& g, const Cover& l,
                                std::vector<EffItem> items) {
  int next_pseudo = g.node_count() + 1000;
  for (int j = 1; j < l.size(); ++j) {
    // Largest item subset whose combined parent set has size exactly j and
    // more items than parents. Equivalent search: for every parent subset P
    // of size j, gather all items with parents inside P whose union is P.
    std::vector<int> best;       // item indices
    NodeSet best_ids;
    for_each_subset_of_size(l.members, j, [&](const NodeSet& p) {
      std::vector<int> cand;
      NodeSet cand_ids;
      NodeSet pa_union;
      for (int i = 0; i < static_cast<int>(items.size()); ++i) {
        if (is_subset(items[i].parents, p)) {
          cand.push_back(i);
          cand_ids.push_back(items[i].id);
          pa_union = set_union(pa_union, items[i].parents);
        }
      }
      if (static_cast<int>(pa_union.size()) != j) return;
      if (static_cast<int>(cand.size()) <= j) return;
      std::sort(cand_ids.begin(), cand_ids.end());
      if (cand.size() > best.size() ||
          (cand.size() == best.size() && !best.empty() && cand_ids < best_ids)) {
        best = cand;
        best_ids = cand_ids;
      }
    });
    if (best.empty()) continue;
    NodeSet pa_union;
    for (int i : best) pa_union = set_union(pa_union, items[i].parents);
    std::vector<EffItem> kept;
    for (int i = 0; i < static_cast<int>(items.size()); ++i)
      if (std::find(best.begin(), best.end(), i) == best.end())
        kept.push_back(items[i]);
    for (int t = 0; t < j; ++t) kept.push_back({next_pseudo++, pa_union});
    items = std::move(kept);
  }
  return static_cast<int>(items.size());
}

}  // namespace

int effective_cardinality_of(const HierGraph& g, const Cover& l,
                             const NodeSet& children_subset) {
  std::vector<EffItem> items;
  for (NodeId c : children_subset)
    items.push_back({c, set_intersection(g.parents(c), l.members)});
  return effective_cardinality_items(g, l, std::move(items));
}

int effective_cardinality(const HierGraph& g, const Cover& l) {
  return effective_cardinality_of(g, l, pure_children(g, l.members));
}

namespace {

// Conditions 1-2 of the atomic-cover definition, in the operational reading
// used throughout: enough effective pure children, and at least k+1
// adjacent variables outside the cover.
bool cover_conditions_12(const HierGraph& g, const Cover& l) {
  int k = l.size();
  NodeSet pch = pure_children(g, l.members);
  if (pch.empty()) return false;
  if (effective_cardinality_of(g, l, pch) < k + 1) return false;
  NodeSet adj;
  for (NodeId m : l.members) adj = set_union(adj, g.adjacent(m));
  adj = set_difference(adj, l.members);
  return static_cast<int>(adj.size()) >= k + 1;
}

}  // namespace

bool is_latent_atomic_cover(const HierGraph& g, const Cover& l) {
  for (NodeId v : l.members) {
    g.check_node(v);
    if (!g.is_latent(v)) return false;
  }
  if (l.members.empty()) return false;
  if (!cover_conditions_12(g, l)) return false;
  // No bipartition where both halves qualify on their own while exactly
  // splitting the pure children.
  int k = l.size();
  if (k == 1) return true;
  NodeSet pch = pure_children(g, l.members);
  for (int mask = 1; mask < (1 << k) - 1; ++mask) {
    NodeSet l1, l2;
    for (int i = 0; i < k; ++i)
      ((mask >> i) & 1 ? l1 : l2).push_back(l.members[i]);
    if (!cover_conditions_12(g, Cover(l1))) continue;
    if (!cover_conditions_12(g, Cover(l2))) continue;
    NodeSet joint = set_union(pure_children(g, l1), pure_children(g, l2));
    joint = set_difference(joint, l.members);
    if (joint == pch) return false;
  }
  return true;
}

namespace {

std::vector<Cover> enumerate_atomic_covers(const HierGraph& g,
                                           const Il2hOptions& opt) {
  NodeSet latents = g.latent_nodes();
  std::vector<Cover> out;
  int cap = std::min<int>(opt.max_cover_size, static_cast<int>(latents.size()));
  for (int k = 1; k <= cap; ++k) {
    for_each_subset_of_size(latents, k, [&](const NodeSet& sub) {
      Cover c(sub);
      if (is_latent_atomic_cover(g, c)) out.push_back(c);
    });
  }
  return out;
}

std::string describe(const HierGraph& g, const NodeSet& s) {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < s.size(); ++i)
    os << (i ? "," : "") << g.name(s[i]);
  os << "}";
  return os.str();
}

}  // namespace

std::vector<Il2hViolation> validate_il2h(const HierGraph& g,
                                         const Il2hOptions& opt) {
  std::vector<Il2hViolation> out;
  std::vector<Cover> covers = enumerate_atomic_covers(g, opt);

  // Clause 1: every latent belongs to at least one atomic cover.
  for (NodeId v : g.latent_nodes()) {
    bool found = false;
    for (const auto& c : covers)
      if (set_contains(c.members, v)) {
        found = true;
        break;
      }
    if (!found)
      out.push_back({1, "latent " + g.name(v) + " is in no latent atomic cover"});
  }

  // Clause 2: covers with overlapping pure descendants must nest.
  for (size_t i = 0; i < covers.size(); ++i) {
    for (size_t j = i + 1; j < covers.size(); ++j) {
      const NodeSet& a = covers[i].members;
      const NodeSet& b = covers[j].members;
      NodeSet pde_a = pure_descendants(g, a);
      NodeSet pde_b = pure_descendants(g, b);
      if (set_intersection(pde_a, pde_b).empty()) continue;
      bool ok = is_subset(a, b) || is_subset(a, pde_b) || is_subset(b, a) ||
                is_subset(b, pde_a);
      if (!ok)
        out.push_back({2, "covers " + describe(g, a) + " and " + describe(g, b) +
                              " partly overlap"});
    }
  }

  // Clause 3: mediators and common causes need 2k extra neighbors
  // (parents, children and siblings all count).
  auto cover_edge = [&](const Cover& x, const Cover& y) {
    for (NodeId u : x.members)
      for (NodeId v : y.members)
        if (g.has_edge(u, v)) return true;
    return false;
  };
  for (const auto& cb : covers) {
    for (const auto& ca : covers) {
      for (const auto& cc : covers) {
        if (&ca == &cb || &cc == &cb || &ca == &cc) continue;
        if (!set_intersection(ca.members, cb.members).empty()) continue;
        if (!set_intersection(cc.members, cb.members).empty()) continue;
        if (!set_intersection(ca.members, cc.members).empty()) continue;
        bool chain = cover_edge(ca, cb) && cover_edge(cb, cc);
        bool fork = cover_edge(cb, ca) && cover_edge(cb, cc);
        if (!chain && !fork) continue;
        int k = cb.size();
        NodeSet nbr;
        for (NodeId m : cb.members) {
          nbr = set_union(nbr, g.adjacent(m));
          nbr = set_union(nbr, relatives(g, {m}, Relation::Siblings));
        }
        nbr = set_difference(nbr, cb.members);
        nbr = set_difference(nbr, ca.members);
        nbr = set_difference(nbr, cc.members);
        // Parents of cb that head a v-structure into cb do not count.
        NodeSet pa = relatives(g, cb.members, Relation::Parents);
        for (NodeId p : pa) {
          for (NodeId q : pa) {
            if (p >= q) continue;
            if (!g.has_edge(p, q) && !g.has_edge(q, p)) {
              nbr = set_difference(nbr, {p});
              nbr = set_difference(nbr, {q});
            }
          }
        }
        if (static_cast<int>(nbr.size()) < 2 * k) {
          out.push_back({3, "cover " + describe(g, cb.members) +
                                " lacks 2k neighbors between " +
                                describe(g, ca.members) + " and " +
                                describe(g, cc.members)});
        }
      }
    }
  }
  // Deduplicate clause-3 reports (symmetric triples produce repeats).
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.clause, a.detail) < std::tie(b.clause, b.detail);
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const auto& a, const auto& b) {
                          return a.clause == b.clause && a.detail == b.detail;
                        }),
            out.end());
  return out;
}

}  // namespace lhcd
