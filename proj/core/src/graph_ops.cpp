#include "lhcd/graph_ops.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "lhcd/discovery.hpp"

namespace lhcd {

namespace {

std::vector<Cover> covers_by_depth(const HierGraph& g) {
  // Deeper covers first, so merges proceed bottom-up.
  std::map<NodeId, int> depth;
  NodeSet order = g.topological_order();
  for (NodeId v : order) {
    int d = 0;
    for (NodeId p : g.parents(v)) d = std::max(d, depth[p] + 1);
    depth[v] = d;
  }
  auto cs = g.covers();
  std::sort(cs.begin(), cs.end(), [&](const Cover& a, const Cover& b) {
    int da = 0, db = 0;
    for (NodeId v : a.members) da = std::max(da, depth[v]);
    for (NodeId v : b.members) db = std::max(db, depth[v]);
    if (da != db) return da > db;
    return a.members < b.members;
  });
  return cs;
}

bool forms_one_atomic_cover(const HierGraph& g, const NodeSet& nodes) {
  if (nodes.empty()) return false;
  for (NodeId v : nodes)
    if (!g.is_latent(v)) return false;
  for (const auto& c : g.covers())
    if (c.members == nodes) return true;
  return is_latent_atomic_cover(g, Cover(nodes));
}

}  // namespace

HierGraph minimal_graph_operator(const HierGraph& g_in) {
  HierGraph g = g_in;
  bool changed = true;
  int guard = 0;
  while (changed && ++guard < 64) {
    changed = false;
    for (const Cover& l : covers_by_depth(g)) {
      bool intact = true;
      for (NodeId v : l.members)
        if (!g.alive(v)) intact = false;
      if (!intact) continue;

      NodeSet pa = set_difference(relatives(g, l.members, Relation::Parents),
                                  l.members);
      if (pa.empty()) continue;
      std::optional<Cover> parent = g.cover_of(pa[0]);
      if (!parent) continue;
      if (!is_subset(pa, parent->members)) continue;  // parents span covers
      if (parent->size() != l.size()) continue;
      // Every member of l must be a pure child of the parent cover.
      bool pure = true;
      for (NodeId v : l.members) {
        const NodeSet& p = g.parents(v);
        if (p.empty() || !is_subset(p, parent->members)) pure = false;
      }
      if (!pure) continue;

      NodeSet pch = pure_children(g, l.members);
      NodeSet sib = set_difference(pure_children(g, parent->members), l.members);
      if (!forms_one_atomic_cover(g, pch) && !forms_one_atomic_cover(g, sib))
        continue;

      // Merge: children of l become children of every parent member.
      NodeSet kids;
      for (NodeId v : l.members) kids = set_union(kids, g.children(v));
      kids = set_difference(kids, l.members);
      for (NodeId v : l.members) g.remove_node(v);
      for (NodeId p : parent->members)
        for (NodeId c : kids)
          if (!g.has_edge(p, c)) g.add_edge(p, c);
      changed = true;
      break;
    }
  }
  return g;
}

HierGraph skeleton_operator(const HierGraph& g_in) {
  HierGraph g = g_in;
  for (const Cover& c : g_in.covers()) {
    NodeSet pch = pure_children(g, c.members);
    for (NodeId child : pch)
      for (NodeId l : c.members)
        if (!g.has_edge(l, child)) g.add_edge(l, child);
  }
  return g;
}

namespace {

struct CoverView {
  std::vector<Cover> covers;
  std::vector<std::vector<int>> adj;  // 0 none, 1 undirected, 2 directed

  int of(NodeId v) const {
    for (size_t i = 0; i < covers.size(); ++i)
      if (set_contains(covers[i].members, v)) return static_cast<int>(i);
    return -1;
  }
};

CoverView view_of(const HierGraph& g) {
  CoverView cv;
  cv.covers = g.covers();
  std::sort(cv.covers.begin(), cv.covers.end());
  int n = static_cast<int>(cv.covers.size());
  cv.adj.assign(n, std::vector<int>(n, 0));
  for (const auto& [u, v] : g.directed_edges()) {
    if (!g.is_latent(u) || !g.is_latent(v)) continue;
    int a = cv.of(u), b = cv.of(v);
    if (a < 0 || b < 0 || a == b) continue;
    cv.adj[a][b] = 2;
  }
  for (const auto& [u, v] : g.undirected_edges()) {
    int a = cv.of(u), b = cv.of(v);
    if (a < 0 || b < 0 || a == b) continue;
    if (cv.adj[a][b] == 0 && cv.adj[b][a] == 0) cv.adj[a][b] = cv.adj[b][a] = 1;
  }
  return cv;
}

}  // namespace

HierGraph to_mec(const HierGraph& g) {
  CoverView cv = view_of(g);
  int n = static_cast<int>(cv.covers.size());
  // V-structures among covers: directed a->c<-b with a, b nonadjacent.
  std::set<std::pair<int, int>> compelled;  // directed cover edges to keep
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        if (a == c || b == c) continue;
        if (cv.adj[a][c] == 2 && cv.adj[b][c] == 2 &&
            cv.adj[a][b] == 0 && cv.adj[b][a] == 0) {
          compelled.insert({a, c});
          compelled.insert({b, c});
        }
      }
  HierGraph out = g;
  for (const auto& [u, v] : out.directed_edges())
    if (out.is_latent(u) && out.is_latent(v)) out.remove_edge(u, v);
  for (const auto& [u, v] : out.undirected_edges()) out.remove_undirected(u, v);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (cv.adj[i][j] == 0) continue;
      bool keep_directed = compelled.count({i, j}) > 0;
      if (cv.adj[i][j] == 2 && keep_directed) {
        for (NodeId u : cv.covers[i].members)
          for (NodeId v : cv.covers[j].members) out.add_edge(u, v);
      } else if (i < j || cv.adj[j][i] == 0) {
        bool other_directed = compelled.count({j, i}) > 0 && cv.adj[j][i] == 2;
        if (!other_directed && !keep_directed) {
          for (NodeId u : cv.covers[i].members)
            for (NodeId v : cv.covers[j].members)
              if (!out.has_undirected(u, v)) out.add_undirected(u, v);
        }
      }
    }
  return apply_meek_rules(out);
}

namespace {

// Node-level skeleton and compelled directions after MEC normalization.
struct MecForm {
  HierGraph g;
  std::vector<std::set<NodeId>> skel;
  std::vector<std::set<NodeId>> directed;  // u -> v among latents
};

MecForm mec_form(const HierGraph& g_in) {
  MecForm f{to_mec(g_in), {}, {}};
  int n = f.g.node_count();
  f.skel.assign(n, {});
  f.directed.assign(n, {});
  for (const auto& [u, v] : f.g.directed_edges()) {
    f.skel[u].insert(v);
    f.skel[v].insert(u);
    if (f.g.is_latent(u) && f.g.is_latent(v)) f.directed[u].insert(v);
  }
  for (const auto& [u, v] : f.g.undirected_edges()) {
    f.skel[u].insert(v);
    f.skel[v].insert(u);
  }
  return f;
}

}  // namespace

bool mec_equal(const HierGraph& g1, const HierGraph& g2) {
  MecForm f1 = mec_form(g1);
  MecForm f2 = mec_form(g2);
  NodeSet m1 = f1.g.measured_nodes();
  NodeSet m2 = f2.g.measured_nodes();
  if (m1 != m2) return false;
  NodeSet l1 = f1.g.latent_nodes();
  NodeSet l2 = f2.g.latent_nodes();
  if (l1.size() != l2.size()) return false;

  // Cover size multisets must agree.
  auto sizes = [](const HierGraph& g) {
    std::vector<int> s;
    for (const auto& c : g.covers()) s.push_back(c.size());
    std::sort(s.begin(), s.end());
    return s;
  };
  if (sizes(f1.g) != sizes(f2.g)) return false;

  // Invariant key per latent: measured neighborhood and degrees.
  auto key_of = [](const MecForm& f, NodeId v) {
    NodeSet meas;
    int lat_deg = 0;
    for (NodeId u : f.skel[v]) {
      if (f.g.is_measured(u))
        set_insert(meas, u);
      else
        ++lat_deg;
    }
    auto cov = f.g.cover_of(v);
    int csize = cov ? cov->size() : 0;
    return std::make_tuple(meas, lat_deg, csize,
                           static_cast<int>(f.directed[v].size()));
  };

  std::map<NodeId, NodeId> fwd;
  std::map<NodeId, NodeId> bwd;
  std::function<bool(size_t)> assign = [&](size_t idx) -> bool {
    if (idx == l1.size()) return true;
    NodeId u = l1[idx];
    for (NodeId v : l2) {
      if (bwd.count(v)) continue;
      if (key_of(f1, u) != key_of(f2, v)) continue;
      // Consistency with already-assigned neighbors.
      bool ok = true;
      for (NodeId w : l1) {
        if (!fwd.count(w)) continue;
        NodeId wv = fwd[w];
        if (f1.skel[u].count(w) != f2.skel[v].count(wv)) ok = false;
        if (f1.directed[u].count(w) !=
            f2.directed[v].count(wv))
          ok = false;
        if (f1.directed[w].count(u) != f2.directed[wv].count(v)) ok = false;
        if (!ok) break;
      }
      if (!ok) continue;
      // Cover co-membership must match.
      auto c1 = f1.g.cover_of(u);
      auto c2 = f2.g.cover_of(v);
      for (NodeId w : l1) {
        if (!fwd.count(w)) continue;
        bool same1 = c1 && set_contains(c1->members, w);
        auto cw = f2.g.cover_of(fwd[w]);
        bool same2 = c2 && cw && c2->members == cw->members &&
                     set_contains(c2->members, fwd[w]);
        if (same1 != same2) ok = false;
      }
      if (!ok) continue;
      fwd[u] = v;
      bwd[v] = u;
      if (assign(idx + 1)) return true;
      fwd.erase(u);
      bwd.erase(v);
    }
    return false;
  };
  return assign(0);
}

}  // namespace lhcd
