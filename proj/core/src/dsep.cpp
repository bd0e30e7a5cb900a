#include "lhcd/dsep.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

namespace lhcd {

namespace {

NodeSet ancestors_of(const HierGraph& g, const NodeSet& seed) {
  NodeSet seen = seed;
  std::deque<NodeId> q(seed.begin(), seed.end());
  while (!q.empty()) {
    NodeId v = q.front();
    q.pop_front();
    for (NodeId p : g.parents(v))
      if (!set_contains(seen, p)) {
        set_insert(seen, p);
        q.push_back(p);
      }
  }
  return seen;
}

template <typename Fn>
bool any_subset_of_size(const NodeSet& universe, int k, Fn&& fn) {
  int n = static_cast<int>(universe.size());
  if (k > n || k < 0) return false;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    NodeSet sub;
    sub.reserve(k);
    for (int i : idx) sub.push_back(universe[i]);
    if (fn(sub)) return true;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

bool d_separated(const HierGraph& g, const NodeSet& a, const NodeSet& b,
                 const NodeSet& z) {
  if (!set_intersection(a, b).empty() || !set_intersection(a, z).empty() ||
      !set_intersection(b, z).empty())
    throw InputError("d_separated: endpoint and conditioning sets must be disjoint");
  if (a.empty() || b.empty()) return true;

  // Ancestral closure of a ∪ b ∪ z, moralized, with z deleted.
  NodeSet anc = ancestors_of(g, set_union(set_union(a, b), z));
  std::vector<NodeSet> nbr(g.node_count());
  auto connect = [&](NodeId u, NodeId v) {
    set_insert(nbr[u], v);
    set_insert(nbr[v], u);
  };
  for (NodeId v : anc) {
    for (NodeId p : g.parents(v)) {
      if (!set_contains(anc, p)) continue;
      connect(p, v);
      for (NodeId p2 : g.parents(v)) {
        if (p2 <= p || !set_contains(anc, p2)) continue;
        connect(p, p2);
      }
    }
  }
  NodeSet blocked = z;
  std::deque<NodeId> q(a.begin(), a.end());
  NodeSet seen = a;
  while (!q.empty()) {
    NodeId v = q.front();
    q.pop_front();
    if (set_contains(b, v)) return false;
    for (NodeId u : nbr[v]) {
      if (set_contains(blocked, u) || set_contains(seen, u)) continue;
      set_insert(seen, u);
      q.push_back(u);
    }
  }
  return true;
}

std::optional<MinSepResult> min_dsep(const HierGraph& g, const NodeSet& xa,
                                     const NodeSet& xb, const DsepOptions& opt) {
  if (xa.empty() || xb.empty()) {
    MinSepResult r;
    r.cardinality = 0;
    r.outside_rank_regime = true;
    return r;
  }
  if (!set_intersection(xa, xb).empty())
    throw InputError("min_dsep: endpoint sets overlap");
  NodeSet latents = g.latent_nodes();
  latents = set_difference(latents, xa);
  latents = set_difference(latents, xb);
  if (static_cast<int>(latents.size()) > opt.max_latents) {
    std::ostringstream os;
    os << "min_dsep: " << latents.size() << " latents exceed cap "
       << opt.max_latents;
    throw CapacityError(os.str());
  }
  int full = static_cast<int>(std::min(xa.size(), xb.size()));
  for (int k = 0; k <= static_cast<int>(latents.size()); ++k) {
    MinSepResult r;
    bool found = any_subset_of_size(latents, k, [&](const NodeSet& sub) {
      if (!d_separated(g, xa, xb, sub)) return false;
      r.cardinality = k;
      r.witness = sub;
      return true;
    });
    if (found) {
      r.outside_rank_regime = r.cardinality >= full;
      return r;
    }
  }
  return std::nullopt;
}

int min_dsep_cardinality(const HierGraph& g, const RankQuery& q,
                         const DsepOptions& opt) {
  NodeSet xa = measured_pure_descendants(g, q.a);
  NodeSet xb = measured_pure_descendants(g, q.b);
  auto r = min_dsep(g, xa, xb, opt);
  if (!r)
    throw InputError("min_dsep_cardinality: no latent subset separates the sets");
  return r->cardinality;
}

int graphical_rank(const HierGraph& g, const RankQuery& q,
                   const DsepOptions& opt) {
  NodeSet all_measured = g.measured_nodes();
  auto check_surrogate = [&](const SetElement& e) {
    if (e.is_measured()) return;
    NodeSet m = measured_pure_descendants(g, e.cover->members);
    NodeSet others = set_difference(all_measured, m);
    if (m.empty()) {
      throw InputError("graphical_rank: cover " + std::to_string(e.cover->members[0]) +
                       " has no measured pure descendants");
    }
    if (!others.empty() && !d_separated(g, m, others, e.cover->members)) {
      std::ostringstream os;
      os << "graphical_rank: element {";
      for (NodeId v : e.cover->members) os << g.name(v) << ",";
      os << "} does not separate its surrogate measures from the rest";
      throw InputError(os.str());
    }
  };
  for (const auto& e : q.a) check_surrogate(e);
  for (const auto& e : q.b) check_surrogate(e);

  NodeSet xa = measured_pure_descendants(g, q.a);
  NodeSet xb = measured_pure_descendants(g, q.b);
  if (!set_intersection(xa, xb).empty())
    throw InputError("graphical_rank: surrogate sets overlap");
  auto r = min_dsep(g, xa, xb, opt);
  int full = static_cast<int>(std::min(xa.size(), xb.size()));
  if (!r) return full;
  return std::min(r->cardinality, full);
}

bool is_bond_set(const HierGraph& g, const NodeSet& x, const DsepOptions& opt) {
  for (NodeId v : x)
    if (!g.is_measured(v)) throw InputError("is_bond_set: non-measured node");
  NodeSet rest = set_difference(g.measured_nodes(), x);
  if (rest.size() < 2) return false;
  auto min_sep = min_dsep(g, x, rest, opt);
  if (!min_sep) return false;
  int k = min_sep->cardinality;

  NodeSet latents = set_difference(g.latent_nodes(), set_union(x, rest));
  bool bond = false;
  any_subset_of_size(latents, k, [&](const NodeSet& sep) {
    if (!d_separated(g, x, rest, sep)) return false;
    // Remaining measures split into components of pairwise d-connection
    // given this separator; any split certifies the bond.
    std::vector<NodeId> nodes(rest.begin(), rest.end());
    int n = static_cast<int>(nodes.size());
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    for (int i = 0; i < n; ++i) {
      if (comp[i] >= 0) continue;
      comp[i] = ncomp;
      std::deque<int> q{i};
      while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int v = 0; v < n; ++v) {
          if (comp[v] >= 0) continue;
          if (!d_separated(g, {nodes[u]}, {nodes[v]}, sep)) {
            comp[v] = ncomp;
            q.push_back(v);
          }
        }
      }
      ++ncomp;
    }
    if (ncomp > 1) {
      bond = true;
      return true;
    }
    return false;
  });
  return bond;
}

}  // namespace lhcd
