#include "lhcd/discovery.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace lhcd {

namespace {

void trace(const SearchConfig& cfg, const std::string& msg) {
  if (cfg.trace) cfg.trace(msg);
}

std::string show_vars(const HierGraph& g, const NodeSet& s) {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << g.name(s[i]);
  os << "}";
  return os.str();
}

int width_of(const ElementSet& s) { return set_size(s).second; }

}  // namespace

namespace detail {

// Child elements of a cover: measured pure children as singletons, latent
// pure children grouped by their annotated covers (only covers fully
// contained in the pure-children set participate).
ElementSet child_elements(const HierGraph& g, const Cover& c) {
  NodeSet pch = pure_children(g, c.members);
  ElementSet out;
  std::vector<Cover> seen;
  for (NodeId v : pch) {
    if (g.is_measured(v)) {
      out.push_back(SetElement::make_measured(v));
      continue;
    }
    auto cv = g.cover_of(v);
    if (!cv) continue;
    if (std::find(seen.begin(), seen.end(), *cv) != seen.end()) continue;
    if (is_subset(cv->members, pch)) {
      seen.push_back(*cv);
      out.push_back(SetElement::make_cover(*cv));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

std::optional<int> surrogate_rank(const HierGraph& g, RankProvider& provider,
                                  const ElementSet& a, const ElementSet& b) {
  NodeSet xa = measured_pure_descendants(g, a);
  NodeSet xb = measured_pure_descendants(g, b);
  if (xa.empty() || xb.empty()) return std::nullopt;
  if (!set_intersection(xa, xb).empty()) return std::nullopt;
  return provider.rank(xa, xb);
}

std::optional<int> atomic_rank_deficient(const HierGraph& g,
                                         RankProvider& provider,
                                         const ElementSet& frontier,
                                         const ElementSet& a, int k) {
  ElementSet b;
  for (const auto& e : frontier)
    if (std::find(a.begin(), a.end(), e) == a.end()) b.push_back(e);
  if (b.empty()) return std::nullopt;
  int wa = width_of(a);
  int wb = width_of(b);
  if (wa < k + 1) return std::nullopt;
  auto r = surrogate_rank(g, provider, a, b);
  if (!r) return std::nullopt;
  if (*r <= k && *r < std::min(wa, wb)) return *r;
  return std::nullopt;
}

namespace {

// Enumerates subsets of `universe` whose variable count lies in [lo, hi],
// returned ascending by (variable count, element indices).
std::vector<std::vector<int>> subsets_by_width(const ElementSet& universe,
                                               int lo, int hi, long cap,
                                               const std::string& what) {
  std::vector<std::vector<int>> out;
  std::vector<int> sizes;
  sizes.reserve(universe.size());
  for (const auto& e : universe)
    sizes.push_back(static_cast<int>(e.variables().size()));
  std::vector<int> cur;
  long count = 0;
  std::function<void(int, int)> rec = [&](int idx, int w) {
    if (w > hi) return;
    if (w >= lo && !cur.empty()) {
      out.push_back(cur);
      if (++count > cap)
        throw CapacityError("test-set budget exhausted while sweeping " + what);
    }
    for (int i = idx; i < static_cast<int>(universe.size()); ++i) {
      cur.push_back(i);
      rec(i + 1, w + sizes[i]);
      cur.pop_back();
    }
  };
  rec(0, 0);
  std::stable_sort(out.begin(), out.end(),
                   [&](const std::vector<int>& a, const std::vector<int>& b) {
                     int wa = 0, wb = 0;
                     for (int i : a) wa += sizes[i];
                     for (int i : b) wb += sizes[i];
                     if (wa != wb) return wa < wb;
                     return a < b;
                   });
  return out;
}

}  // namespace

namespace detail {

struct Finding {
  NodeSet variables;
  int rank = 0;
};

// Greedy frontier search shared by the first and second phases.
struct ClusterSearch {
  HierGraph& g;
  RankProvider& provider;
  const SearchConfig& cfg;
  ElementSet active;
  NodeSet universe;  // measured footprint of the initial frontier

  void run();
  bool sweep(int k);
  bool process(std::vector<Finding> findings);
  void chain_connect();

  NodeSet rest_of(const NodeSet& xa) const {
    return set_difference(universe, xa);
  }

  // Measured footprint of a variable set in the current graph.
  NodeSet footprint(const NodeSet& vars) const {
    NodeSet out, lat;
    for (NodeId v : vars)
      (g.is_measured(v) ? out : lat).push_back(v);
    if (!lat.empty()) out = set_union(out, measured_pure_descendants(g, lat));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::optional<int> rank_vs_rest(const NodeSet& xa) {
    NodeSet xb = rest_of(xa);
    if (xa.empty() || xb.empty()) return std::nullopt;
    if (!set_intersection(xa, xb).empty()) return std::nullopt;
    return provider.rank(xa, xb);
  }

  bool apply_cluster(const Finding& f);
  void remove_from_active(const NodeSet& vars);
};

void ClusterSearch::run() {
  int k = 1;
  while (true) {
    if (static_cast<int>(active.size()) <= 1) break;
    if (k > cfg.max_cover_size) break;
    if (width_of(active) < 2 * (k + 1)) break;
    if (sweep(k)) {
      k = 1;
      continue;
    }
    ++k;
  }
  chain_connect();
}

bool ClusterSearch::sweep(int k) {
  std::vector<int> cover_idx;
  for (int i = 0; i < static_cast<int>(active.size()); ++i)
    if (!active[i].is_measured()) cover_idx.push_back(i);

  // Substitution views, ascending by how many covers are replaced by their
  // pure children; the identity view comes first.
  std::vector<std::vector<int>> views{{}};
  for (int size = 1; size <= static_cast<int>(cover_idx.size()); ++size) {
    std::vector<int> pick(size);
    std::function<void(int, int)> rec = [&](int start, int depth) {
      if (static_cast<long>(views.size()) > cfg.max_subst_subsets)
        throw CapacityError("substitution budget exhausted");
      if (depth == size) {
        views.emplace_back(pick.begin(), pick.end());
        return;
      }
      for (int i = start; i < static_cast<int>(cover_idx.size()); ++i) {
        pick[depth] = cover_idx[i];
        rec(i + 1, depth + 1);
      }
    };
    rec(0, 0);
  }

  for (const auto& view : views) {
    ElementSet stilde;
    bool degenerate = false;
    for (int i = 0; i < static_cast<int>(active.size()); ++i) {
      if (std::find(view.begin(), view.end(), i) == view.end()) {
        stilde.push_back(active[i]);
        continue;
      }
      ElementSet kids = detail::child_elements(g, *active[i].cover);
      if (kids.empty()) {
        degenerate = true;
        break;
      }
      for (auto& e : kids) stilde.push_back(std::move(e));
    }
    if (degenerate) continue;
    std::sort(stilde.begin(), stilde.end());
    stilde.erase(std::unique(stilde.begin(), stilde.end()), stilde.end());
    if (stilde.size() < 2) continue;

    auto draws =
        subsets_by_width(stilde, k + 1, k + 1 + cfg.extra_test_width,
                         cfg.max_test_subsets,
                         show_vars(g, element_variables(stilde)));
    std::vector<Finding> findings;
    for (const auto& idxs : draws) {
      if (idxs.size() >= stilde.size()) continue;
      ElementSet a;
      for (int i : idxs) a.push_back(stilde[i]);
      auto kprime = atomic_rank_deficient(g, provider, stilde, a, k);
      if (kprime) findings.push_back({element_variables(a), *kprime});
    }
    if (!findings.empty() && process(std::move(findings))) return true;
  }
  return false;
}

bool ClusterSearch::process(std::vector<Finding> findings) {
  // Merge overlapping findings; a merged cluster takes the lowest rank of
  // its parts, and only clusters at the overall lowest rank are kept.
  int n = static_cast<int>(findings.size());
  std::vector<int> root(n);
  std::iota(root.begin(), root.end(), 0);
  std::function<int(int)> find = [&](int i) {
    return root[i] == i ? i : root[i] = find(root[i]);
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!set_intersection(findings[i].variables, findings[j].variables)
               .empty())
        root[find(i)] = find(j);
  std::map<int, Finding> merged;
  for (int i = 0; i < n; ++i) {
    auto& m = merged[find(i)];
    if (m.variables.empty()) {
      m = findings[i];
    } else {
      m.variables = set_union(m.variables, findings[i].variables);
      m.rank = std::min(m.rank, findings[i].rank);
    }
  }
  int lowest = std::numeric_limits<int>::max();
  for (const auto& [_, f] : merged) lowest = std::min(lowest, f.rank);
  std::vector<Finding> clusters;
  for (auto& [_, f] : merged)
    if (f.rank == lowest) clusters.push_back(std::move(f));
  std::sort(clusters.begin(), clusters.end(),
            [](const Finding& a, const Finding& b) {
              if (a.variables.size() != b.variables.size())
                return a.variables.size() < b.variables.size();
              return a.variables < b.variables;
            });

  bool changed = false;
  NodeSet consumed;
  for (const auto& cl : clusters) {
    if (!set_intersection(cl.variables, consumed).empty()) continue;
    if (apply_cluster(cl)) {
      changed = true;
      consumed = set_union(consumed, cl.variables);
    }
  }
  return changed;
}

bool ClusterSearch::apply_cluster(const Finding& cl) {
  // Classify the cluster's variables: free measured nodes, plus the
  // topmost covers standing over everything else.
  std::vector<Cover> tops;
  NodeSet frees;
  auto push_top = [&](const Cover& c) {
    if (std::find(tops.begin(), tops.end(), c) == tops.end()) tops.push_back(c);
  };
  for (NodeId v : cl.variables) {
    if (!g.alive(v)) return false;  // stale finding
    std::optional<Cover> top;
    if (g.is_latent(v)) {
      top = g.cover_of(v);
      if (!top) return false;
    } else if (!g.parents(v).empty()) {
      for (NodeId p : g.parents(v)) {
        auto pc = g.cover_of(p);
        if (pc) push_top(*pc);
      }
      continue;
    } else {
      set_insert(frees, v);
      continue;
    }
    while (true) {
      NodeSet pa =
          set_difference(relatives(g, top->members, Relation::Parents),
                         top->members);
      if (pa.empty()) break;
      auto up = g.cover_of(pa[0]);
      if (!up || *up == *top) break;
      top = up;
    }
    push_top(*top);
  }
  std::sort(tops.begin(), tops.end());

  int top_width = 0;
  NodeSet top_members;
  for (const auto& c : tops) {
    top_width += c.size();
    top_members = set_union(top_members, c.members);
  }

  // Re-detections of material already represented inside the tops.
  if (frees.empty() && !tops.empty()) {
    NodeSet pde = pure_descendants(g, top_members);
    bool internal = true;
    for (NodeId v : cl.variables)
      if (!set_contains(pde, v) && !set_contains(top_members, v))
        internal = false;
    bool all_below = true;
    for (NodeId v : cl.variables)
      if (set_contains(top_members, v)) all_below = false;
    if (top_width == cl.rank && internal) {
      trace(cfg, "skip re-detection " + show_vars(g, cl.variables));
      return false;
    }
    if (all_below && internal) {
      trace(cfg, "skip internal structure " + show_vars(g, cl.variables));
      return false;
    }
  }

  NodeSet x_cluster = footprint(cl.variables);
  NodeSet rest = rest_of(x_cluster);

  if (top_width == cl.rank && !tops.empty() && !frees.empty()) {
    // The joined tops already carry the whole rank; the free variables are
    // candidate extra children of that junction. Each must carry the full
    // rank alone, jointly with the tops, and jointly with every existing
    // child element.
    bool ok = true;
    NodeSet x_tops = footprint(top_members);
    for (NodeId v : frees) {
      auto r1 = rank_vs_rest({v});
      auto r2 = rank_vs_rest(set_union(NodeSet{v}, x_tops));
      if (!r1 || *r1 != cl.rank || !r2 || *r2 != cl.rank) {
        ok = false;
        break;
      }
      for (const auto& top : tops) {
        for (const auto& ch : detail::child_elements(g, top)) {
          NodeSet xch = footprint(element_variables({ch}));
          auto r3 = rank_vs_rest(set_union(NodeSet{v}, xch));
          if (!r3 || *r3 != cl.rank) {
            ok = false;
            break;
          }
        }
        if (!ok) break;
      }
      if (!ok) break;
    }
    if (ok) {
      for (NodeId v : frees)
        for (NodeId p : top_members)
          if (!g.has_edge(p, v)) g.add_edge(p, v);
      remove_from_active(frees);
      trace(cfg, "extend " + show_vars(g, top_members) + " with " +
                     show_vars(g, frees));
      return true;
    }
    // Fall through: the junction sits below a fresh cover instead.
  }

  // New cover. Decide per top cover whether its latents belong inside the
  // new cover (the deficiency persists without its measures) or below it.
  std::vector<Cover> subsumed, layered;
  for (const auto& c : tops) {
    bool subsume = false;
    if (c.size() < cl.rank && !rest.empty()) {
      NodeSet without = set_difference(x_cluster, footprint(c.members));
      if (!without.empty()) {
        int r = provider.rank(without, rest);
        subsume = (r == cl.rank);
      }
    }
    (subsume ? subsumed : layered).push_back(c);
  }
  int subsumed_width = 0;
  for (const auto& c : subsumed) subsumed_width += c.size();
  int fresh_count = cl.rank - subsumed_width;
  if (fresh_count < 0 || (fresh_count == 0 && subsumed.empty())) {
    trace(cfg, "conflicting cluster ignored " + show_vars(g, cl.variables));
    return false;
  }

  NodeSet members;
  for (const auto& c : subsumed) members = set_union(members, c.members);
  NodeSet fresh;
  for (int i = 0; i < fresh_count; ++i)
    set_insert(fresh, g.add_node(NodeKind::Latent));
  members = set_union(members, fresh);
  if (members.empty()) return false;

  for (NodeId f : fresh) {
    for (NodeId v : frees) g.add_edge(f, v);
    for (const auto& c : layered)
      for (NodeId m : c.members) g.add_edge(f, m);
  }
  for (const auto& c : subsumed) {
    for (NodeId m : c.members) {
      for (NodeId v : frees)
        if (!g.has_edge(m, v)) g.add_edge(m, v);
      for (const auto& lc : layered)
        for (NodeId t : lc.members)
          if (!g.has_edge(m, t)) g.add_edge(m, t);
    }
  }
  for (const auto& c : subsumed) g.remove_cover(c);
  Cover created(members);
  g.add_cover(created);

  NodeSet leaving = set_union(frees, members);
  for (const auto& c : layered) leaving = set_union(leaving, c.members);
  remove_from_active(leaving);
  active.push_back(SetElement::make_cover(created));
  std::sort(active.begin(), active.end());
  trace(cfg, "new cover " + show_vars(g, members) + " rank " +
                 std::to_string(cl.rank) + " over " +
                 show_vars(g, cl.variables));
  return true;
}

void ClusterSearch::remove_from_active(const NodeSet& vars) {
  ElementSet next;
  for (const auto& e : active)
    if (set_intersection(e.variables(), vars).empty()) next.push_back(e);
  active = std::move(next);
}

void ClusterSearch::chain_connect() {
  if (active.size() < 2) return;
  std::vector<Cover> covers;
  NodeSet loose;
  for (const auto& e : active) {
    if (e.is_measured())
      set_insert(loose, *e.measured);
    else
      covers.push_back(*e.cover);
  }
  std::sort(covers.begin(), covers.end(), [](const Cover& a, const Cover& b) {
    return a.members.front() < b.members.front();
  });
  for (size_t i = 0; i + 1 < covers.size(); ++i)
    for (NodeId u : covers[i].members)
      for (NodeId v : covers[i + 1].members)
        if (!g.has_edge(u, v)) g.add_edge(u, v);
  if (!covers.empty())
    for (NodeId u : covers.back().members)
      for (NodeId v : loose)
        if (!g.has_edge(u, v)) g.add_edge(u, v);
}

void run_cluster_search(HierGraph& g, ElementSet frontier,
                        RankProvider& provider, const SearchConfig& cfg) {
  std::sort(frontier.begin(), frontier.end());
  ClusterSearch cs{g, provider, cfg, frontier,
                   measured_pure_descendants(g, frontier)};
  cs.run();
}

}  // namespace detail

HierGraph find_causal_clusters(const NodeSet& measured, RankProvider& provider,
                               const SearchConfig& cfg) {
  if (measured.size() < 3)
    throw InputError("find_causal_clusters: need at least 3 measured variables");
  HierGraph g;
  for (size_t i = 0; i < measured.size(); ++i) {
    if (measured[i] != static_cast<NodeId>(i))
      throw InputError("find_causal_clusters: measured ids must be dense 0..m-1");
    g.add_node(NodeKind::Measured, "X" + std::to_string(i + 1));
  }
  ElementSet frontier;
  for (NodeId v : measured) frontier.push_back(SetElement::make_measured(v));
  detail::run_cluster_search(g, std::move(frontier), provider, cfg);
  return g;
}

HierGraph make_root(const HierGraph& g, const Cover& l) {
  HierGraph out = g;
  for (NodeId m : l.members) out.check_node(m);
  std::vector<std::pair<NodeId, NodeId>> incoming;
  for (NodeId m : l.members)
    for (NodeId p : out.parents(m))
      if (!set_contains(l.members, p)) incoming.emplace_back(p, m);
  for (const auto& [p, m] : incoming) {
    out.remove_edge(p, m);
    out.add_edge(m, p);
  }
  if (!out.is_acyclic())
    throw InputError("make_root: reorientation created a cycle");
  return out;
}

namespace {

// Canonical structural signature anchored at measured ids; used to detect
// no-op refinements.
std::string graph_signature(const HierGraph& g) {
  std::map<NodeId, std::string> memo;
  std::function<std::string(NodeId)> sig = [&](NodeId v) -> std::string {
    auto it = memo.find(v);
    if (it != memo.end()) return it->second;
    if (g.is_measured(v)) return memo[v] = "m" + std::to_string(v);
    memo[v] = "?";
    std::vector<std::string> kids;
    for (NodeId c : g.children(v)) kids.push_back(sig(c));
    std::sort(kids.begin(), kids.end());
    std::string s = "L(";
    for (const auto& k : kids) s += k + " ";
    s += ")";
    return memo[v] = s;
  };
  std::vector<std::string> tops;
  for (NodeId v : g.nodes())
    if (g.parents(v).empty()) tops.push_back(sig(v));
  std::sort(tops.begin(), tops.end());
  std::string out;
  for (const auto& t : tops) out += t + "|";
  return out;
}

std::vector<Cover> sorted_covers(const HierGraph& g) {
  auto cs = g.covers();
  std::sort(cs.begin(), cs.end(), [](const Cover& a, const Cover& b) {
    return a.members.front() < b.members.front();
  });
  return cs;
}

std::optional<Cover> root_cover(const HierGraph& g) {
  for (const auto& c : sorted_covers(g)) {
    NodeSet pa = set_difference(relatives(g, c.members, Relation::Parents),
                                c.members);
    if (pa.empty()) return c;
  }
  return std::nullopt;
}

std::vector<Cover> cover_children_of(const HierGraph& g, const Cover& c) {
  std::vector<Cover> out;
  for (const auto& e : detail::child_elements(g, c))
    if (!e.is_measured()) out.push_back(*e.cover);
  return out;
}

}  // namespace

HierGraph refine_clusters(const HierGraph& g_in, RankProvider& provider,
                          const SearchConfig& cfg) {
  HierGraph g = g_in;
  auto root = root_cover(g);
  if (!root) return g;

  std::deque<Cover> queue;
  std::set<NodeSet> visited;
  visited.insert(root->members);
  for (const auto& c : cover_children_of(g, *root)) queue.push_back(c);

  int rounds = 0;
  while (!queue.empty()) {
    Cover l = queue.front();
    queue.pop_front();
    if (visited.count(l.members)) continue;
    visited.insert(l.members);
    bool intact = true;
    for (NodeId m : l.members) {
      if (!g.alive(m)) intact = false;
      if (intact) {
        auto c = g.cover_of(m);
        if (!c || !(*c == l)) intact = false;
      }
    }
    if (!intact) continue;
    if (++rounds > cfg.max_refinement_rounds)
      throw CapacityError("refine_clusters: refinement budget exhausted");

    // Single-chain collapse: a lone latent child cover with latent children
    // of its own folds into l so its context joins one search.
    while (true) {
      ElementSet kids = detail::child_elements(g, l);
      if (kids.size() != 1 || kids[0].is_measured()) break;
      Cover c = *kids[0].cover;
      bool c_has_latent_kids = false;
      for (NodeId m : c.members)
        for (NodeId ch : g.children(m))
          if (g.is_latent(ch)) c_has_latent_kids = true;
      if (!c_has_latent_kids) break;
      NodeSet grandkids;
      for (NodeId m : c.members)
        grandkids = set_union(grandkids, g.children(m));
      grandkids = set_difference(grandkids, c.members);
      for (NodeId m : c.members) g.remove_node(m);
      for (NodeId gm : l.members)
        for (NodeId kid : grandkids)
          if (!g.has_edge(gm, kid)) g.add_edge(gm, kid);
    }

    for (const auto& c : cover_children_of(g, l)) queue.push_back(c);

    NodeSet pa = set_difference(relatives(g, l.members, Relation::Parents),
                                l.members);
    std::vector<Cover> parent_covers;
    for (NodeId p : pa) {
      auto pc = g.cover_of(p);
      if (pc && std::find(parent_covers.begin(), parent_covers.end(), *pc) ==
                    parent_covers.end())
        parent_covers.push_back(*pc);
    }

    ElementSet v_set;
    auto push_unique = [&](const SetElement& e) {
      NodeSet ev = e.variables();
      if (!set_intersection(ev, l.members).empty()) return;
      if (std::find(v_set.begin(), v_set.end(), e) == v_set.end())
        v_set.push_back(e);
    };
    for (const auto& pc : parent_covers) {
      NodeSet gp = set_difference(
          relatives(g, pc.members, Relation::Parents), pc.members);
      for (NodeId q : gp) {
        auto qc = g.cover_of(q);
        if (qc) push_unique(SetElement::make_cover(*qc));
      }
      for (const auto& e : detail::child_elements(g, pc)) push_unique(e);
    }
    for (const auto& e : detail::child_elements(g, l)) push_unique(e);

    if (width_of(v_set) < 3) continue;

    HierGraph work = make_root(g, l);
    std::string before = graph_signature(work);
    for (NodeId m : l.members)
      if (work.alive(m)) work.remove_node(m);
    for (const auto& pc : parent_covers)
      for (NodeId m : pc.members)
        if (work.alive(m)) work.remove_node(m);

    std::sort(v_set.begin(), v_set.end());
    detail::run_cluster_search(work, v_set, provider, cfg);

    if (graph_signature(work) != before) {
      g = std::move(work);
      auto nr = root_cover(g);
      queue.clear();
      visited.clear();
      if (nr) {
        visited.insert(nr->members);
        for (const auto& c : cover_children_of(g, *nr)) queue.push_back(c);
      }
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Phase three.
// ---------------------------------------------------------------------------

bool EdgeSet::has(const Cover& a, const Cover& b) const {
  for (const auto& [x, y] : edges)
    if ((x == a && y == b) || (x == b && y == a)) return true;
  return false;
}

void EdgeSet::remove(const Cover& a, const Cover& b) {
  edges.erase(std::remove_if(edges.begin(), edges.end(),
                             [&](const auto& e) {
                               return (e.first == a && e.second == b) ||
                                      (e.first == b && e.second == a);
                             }),
              edges.end());
}

namespace {

std::optional<std::pair<NodeSet, NodeSet>> resolve_surrogates(
    const HierGraph& g, const ElementSet& a, const ElementSet& b) {
  NodeSet xa = measured_pure_descendants(g, a);
  NodeSet xb = measured_pure_descendants(g, b);
  if (xa.empty() || xb.empty()) return std::nullopt;
  if (!set_intersection(xa, xb).empty()) return std::nullopt;
  return std::make_pair(xa, xb);
}

// Nonempty disjoint two-way assignments of the items (items may stay out),
// full balanced splits first.
std::vector<std::pair<ElementSet, ElementSet>> partition_splits(
    const ElementSet& items, int cap) {
  std::vector<std::pair<ElementSet, ElementSet>> out;
  int n = static_cast<int>(items.size());
  if (n < 2) {
    if (n == 1) return out;  // cannot split a single child both ways
    return out;
  }
  std::vector<int> assign(n, 0);
  std::function<void(int)> rec = [&](int idx) {
    if (static_cast<int>(out.size()) >= cap) return;
    if (idx == n) {
      ElementSet a, b;
      for (int i = 0; i < n; ++i) {
        if (assign[i] == 0) a.push_back(items[i]);
        if (assign[i] == 1) b.push_back(items[i]);
      }
      if (!a.empty() && !b.empty()) out.emplace_back(std::move(a), std::move(b));
      return;
    }
    for (int c = 0; c < 3; ++c) {
      assign[idx] = c;
      rec(idx + 1);
    }
  };
  rec(0);
  std::stable_sort(out.begin(), out.end(), [&](const auto& x, const auto& y) {
    int ux = n - static_cast<int>(x.first.size() + x.second.size());
    int uy = n - static_cast<int>(y.first.size() + y.second.size());
    if (ux != uy) return ux < uy;
    int dx = std::abs(width_of(x.first) - width_of(x.second));
    int dy = std::abs(width_of(y.first) - width_of(y.second));
    return dx < dy;
  });
  return out;
}

}  // namespace

CrossCoverResult cross_cover_test(const std::vector<Cover>& s,
                                  const HierGraph& g, RankProvider& provider,
                                  const SearchConfig& cfg) {
  CrossCoverResult res;
  for (size_t i = 0; i < s.size(); ++i)
    for (size_t j = i + 1; j < s.size(); ++j)
      res.edges.edges.emplace_back(s[i], s[j]);

  // Partition material per separator cover comes from the prepared graph;
  // the pair under test never serves as material.
  for (size_t i = 0; i < s.size(); ++i) {
    for (size_t j = i + 1; j < s.size(); ++j) {
      const Cover& la = s[i];
      const Cover& lb = s[j];
      std::vector<Cover> others;
      for (size_t t = 0; t < s.size(); ++t)
        if (t != i && t != j) others.push_back(s[t]);

      bool removed = false;
      for (int k = 0; k <= static_cast<int>(others.size()) && !removed; ++k) {
        std::vector<std::vector<int>> combos;
        std::vector<int> pick(k);
        std::function<void(int, int)> rec = [&](int start, int depth) {
          if (depth == k) {
            combos.push_back(pick);
            return;
          }
          for (int t = start; t < static_cast<int>(others.size()); ++t) {
            pick[depth] = t;
            rec(t + 1, depth + 1);
          }
        };
        rec(0, 0);

        for (const auto& combo : combos) {
          if (removed) break;
          if (combo.empty()) {
            ElementSet aset{SetElement::make_cover(la)};
            ElementSet bset{SetElement::make_cover(lb)};
            auto surr = resolve_surrogates(g, aset, bset);
            if (surr) {
              int rank = provider.rank(surr->first, surr->second);
              if (rank < std::min(la.size(), lb.size())) {
                res.edges.remove(la, lb);
                res.witnesses.push_back({{la, lb}, {aset, bset, rank, {}}});
                removed = true;
              }
            }
            continue;
          }
          std::vector<std::vector<std::pair<ElementSet, ElementSet>>> splits;
          bool feasible = true;
          for (int t : combo) {
            ElementSet kids = detail::child_elements(g, others[t]);
            ElementSet usable;
            for (const auto& e : kids) {
              NodeSet ev = e.variables();
              if (set_intersection(ev, la.members).empty() &&
                  set_intersection(ev, lb.members).empty())
                usable.push_back(e);
            }
            auto sp = partition_splits(usable, cfg.max_partitions);
            if (sp.empty()) {
              feasible = false;
              break;
            }
            splits.push_back(std::move(sp));
          }
          if (!feasible) continue;

          std::vector<int> sel(combo.size(), 0);
          while (!removed) {
            ElementSet aset{SetElement::make_cover(la)};
            ElementSet bset{SetElement::make_cover(lb)};
            int ka = la.size(), kb = lb.size();
            for (size_t t = 0; t < combo.size(); ++t) {
              const auto& [pa, pb] = splits[t][sel[t]];
              for (const auto& e : pa) aset.push_back(e);
              for (const auto& e : pb) bset.push_back(e);
              ka += std::min(others[combo[t]].size(), width_of(pa));
              kb += std::min(others[combo[t]].size(), width_of(pb));
            }
            auto surr = resolve_surrogates(g, aset, bset);
            if (surr) {
              int rank = provider.rank(surr->first, surr->second);
              if (rank < std::min(ka, kb)) {
                res.edges.remove(la, lb);
                CrossCoverWitness w;
                w.a = aset;
                w.b = bset;
                w.rank = rank;
                for (int t : combo) w.separator.push_back(others[t]);
                res.witnesses.push_back({{la, lb}, std::move(w)});
                removed = true;
                break;
              }
            }
            size_t t = 0;
            for (; t < sel.size(); ++t) {
              if (++sel[t] < static_cast<int>(splits[t].size())) break;
              sel[t] = 0;
            }
            if (t == sel.size()) break;
          }
        }
      }
    }
  }
  return res;
}

ColliderSet find_colliders(const std::vector<Cover>& s,
                           const CrossCoverResult& e, const HierGraph& g,
                           RankProvider& provider, const SearchConfig& cfg) {
  (void)cfg;
  ColliderSet out;
  for (size_t i = 0; i < s.size(); ++i) {
    for (size_t j = i + 1; j < s.size(); ++j) {
      if (e.edges.has(s[i], s[j])) continue;
      const CrossCoverWitness* w = nullptr;
      for (const auto& [pair, wit] : e.witnesses)
        if ((pair.first == s[i] && pair.second == s[j]) ||
            (pair.first == s[j] && pair.second == s[i]))
          w = &wit;
      if (!w) continue;
      for (size_t m = 0; m < s.size(); ++m) {
        if (m == i || m == j) continue;
        if (!e.edges.has(s[i], s[m]) || !e.edges.has(s[j], s[m])) continue;
        const Cover& mid = s[m];
        if (std::find(w->separator.begin(), w->separator.end(), mid) !=
            w->separator.end())
          continue;  // separator member: no collider
        ElementSet a_plus = w->a;
        a_plus.push_back(SetElement::make_cover(mid));
        ElementSet b_plus = w->b;
        b_plus.push_back(SetElement::make_cover(mid));
        auto sa = resolve_surrogates(g, a_plus, w->b);
        auto sb = resolve_surrogates(g, w->a, b_plus);
        if (!sa || !sb) continue;
        int k1 = provider.rank(sa->first, sa->second);
        int k2 = provider.rank(sb->first, sb->second);
        if (w->rank < std::min(k1, k2)) out.items.emplace_back(s[i], mid, s[j]);
      }
    }
  }
  return out;
}

namespace {

struct CoverGraph {
  std::vector<Cover> covers;
  // 0 none, 1 undirected, 2 directed row->col.
  std::vector<std::vector<int>> adj;
  bool adjacent(int i, int j) const { return adj[i][j] != 0 || adj[j][i] != 0; }
};

void meek_closure(CoverGraph& cg) {
  int n = static_cast<int>(cg.covers.size());
  auto directed = [&](int a, int b) { return cg.adj[a][b] == 2; };
  auto undirected = [&](int a, int b) {
    return cg.adj[a][b] == 1 || cg.adj[b][a] == 1;
  };
  auto orient = [&](int a, int b) {
    cg.adj[a][b] = 2;
    cg.adj[b][a] = 0;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (a == b || !undirected(a, b)) continue;
        bool done = false;
        // R1: c -> a - b, c and b nonadjacent.
        for (int c = 0; c < n && !done; ++c)
          if (c != b && directed(c, a) && !cg.adjacent(c, b)) {
            orient(a, b);
            done = true;
          }
        // R2: a -> c -> b with a - b.
        for (int c = 0; c < n && !done; ++c)
          if (directed(a, c) && directed(c, b)) {
            orient(a, b);
            done = true;
          }
        // R3: a - c -> b and a - d -> b with c, d nonadjacent.
        for (int c = 0; c < n && !done; ++c) {
          if (!(undirected(a, c) && directed(c, b))) continue;
          for (int d = c + 1; d < n && !done; ++d) {
            if (!(undirected(a, d) && directed(d, b))) continue;
            if (cg.adjacent(c, d)) continue;
            orient(a, b);
            done = true;
          }
        }
        // R4: a - d, d -> c, c -> b, a adjacent to c, d and b nonadjacent.
        for (int d = 0; d < n && !done; ++d) {
          if (!undirected(a, d)) continue;
          for (int c = 0; c < n && !done; ++c) {
            if (!(directed(d, c) && directed(c, b))) continue;
            if (!cg.adjacent(a, c)) continue;
            if (cg.adjacent(d, b)) continue;
            orient(a, b);
            done = true;
          }
        }
        if (done) changed = true;
      }
    }
  }
}

HierGraph rebuild_from_cover_graph(const HierGraph& g, const CoverGraph& cg) {
  HierGraph out = g;
  for (const auto& [u, v] : out.directed_edges())
    if (out.is_latent(u) && out.is_latent(v)) out.remove_edge(u, v);
  for (const auto& [u, v] : out.undirected_edges()) out.remove_undirected(u, v);
  int n = static_cast<int>(cg.covers.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (cg.adj[i][j] == 2) {
        for (NodeId u : cg.covers[i].members)
          for (NodeId v : cg.covers[j].members) out.add_edge(u, v);
      } else if (cg.adj[i][j] == 1 && i < j) {
        for (NodeId u : cg.covers[i].members)
          for (NodeId v : cg.covers[j].members) out.add_undirected(u, v);
      }
    }
  }
  return out;
}

CoverGraph cover_graph_of(const HierGraph& g) {
  CoverGraph cg;
  cg.covers = sorted_covers(g);
  int n = static_cast<int>(cg.covers.size());
  cg.adj.assign(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (NodeId u : cg.covers[i].members)
        for (NodeId v : cg.covers[j].members) {
          if (g.has_edge(u, v)) cg.adj[i][j] = 2;
          if (g.has_undirected(u, v) && cg.adj[i][j] == 0) cg.adj[i][j] = 1;
        }
    }
  return cg;
}

}  // namespace

HierGraph apply_meek_rules(const HierGraph& g) {
  CoverGraph cg = cover_graph_of(g);
  // Normalize: undirected marks stored one-sided.
  int n = static_cast<int>(cg.covers.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (cg.adj[i][j] == 1 || cg.adj[j][i] == 1)
        if (cg.adj[i][j] != 2 && cg.adj[j][i] != 2)
          cg.adj[i][j] = cg.adj[j][i] = 1;
  meek_closure(cg);
  return rebuild_from_cover_graph(g, cg);
}

HierGraph refine_edges(const HierGraph& g_in, RankProvider& provider,
                       const SearchConfig& cfg) {
  HierGraph g = g_in;
  std::vector<Cover> covers = sorted_covers(g);
  if (covers.empty()) return g;

  // Family of a cover: itself and its child covers, expanding recursively
  // through single-child links so chains are tested together.
  auto family_of = [&](const Cover& l) {
    std::vector<Cover> fam{l};
    std::function<void(const Cover&)> grow = [&](const Cover& c) {
      auto kids = cover_children_of(g, c);
      for (const auto& k : kids)
        if (std::find(fam.begin(), fam.end(), k) == fam.end())
          fam.push_back(k);
      if (kids.size() == 1) grow(kids[0]);
    };
    grow(l);
    return fam;
  };

  std::vector<Cover> order;
  {
    auto root = root_cover(g);
    std::function<void(const Cover&)> dfs = [&](const Cover& c) {
      for (const auto& k : cover_children_of(g, c))
        if (std::find(order.begin(), order.end(), k) == order.end()) dfs(k);
      if (std::find(order.begin(), order.end(), c) == order.end())
        order.push_back(c);
    };
    if (root) dfs(*root);
    for (const auto& c : covers)
      if (std::find(order.begin(), order.end(), c) == order.end())
        order.push_back(c);
  }

  std::map<std::pair<NodeSet, NodeSet>, int> verdict;  // 1 keep, -1 removed
  std::map<std::pair<NodeSet, NodeSet>, CrossCoverWitness> witnesses;
  auto key_of = [](const Cover& a, const Cover& b) {
    return a.members < b.members ? std::make_pair(a.members, b.members)
                                 : std::make_pair(b.members, a.members);
  };

  for (const auto& l : order) {
    if (cover_children_of(g, l).empty()) continue;
    auto fam = family_of(l);
    if (fam.size() < 2) continue;

    HierGraph work = make_root(g, l);
    for (size_t i = 0; i < fam.size(); ++i)
      for (size_t j = 0; j < fam.size(); ++j) {
        if (i == j) continue;
        for (NodeId u : fam[i].members)
          for (NodeId v : fam[j].members)
            if (work.has_edge(u, v)) work.remove_edge(u, v);
      }

    CrossCoverResult r = cross_cover_test(fam, work, provider, cfg);
    for (size_t i = 0; i < fam.size(); ++i)
      for (size_t j = i + 1; j < fam.size(); ++j) {
        auto key = key_of(fam[i], fam[j]);
        bool testable = false;
        // Pairs whose surrogates could not be formed stay undecided.
        {
          ElementSet a{SetElement::make_cover(fam[i])};
          ElementSet b{SetElement::make_cover(fam[j])};
          testable = resolve_surrogates(work, a, b).has_value();
        }
        if (r.edges.has(fam[i], fam[j])) {
          if (testable && !verdict.count(key)) verdict[key] = 1;
        } else {
          verdict[key] = -1;
        }
      }
    for (auto& [pair, w] : r.witnesses)
      witnesses[key_of(pair.first, pair.second)] = w;
  }

  CoverGraph cg;
  cg.covers = covers;
  int n = static_cast<int>(covers.size());
  cg.adj.assign(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      auto it = verdict.find(key_of(covers[i], covers[j]));
      bool structural = false;
      for (NodeId u : covers[i].members)
        for (NodeId v : covers[j].members)
          if (g.has_edge(u, v) || g.has_edge(v, u)) structural = true;
      bool present = it != verdict.end() ? it->second > 0 : structural;
      if (it != verdict.end() && it->second > 0 && !structural)
        present = true;
      if (present) cg.adj[i][j] = cg.adj[j][i] = 1;
    }

  // Colliders over the settled skeleton.
  for (int mi = 0; mi < n; ++mi) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (i == mi || j == mi) continue;
        if (cg.adj[i][j] != 0) continue;
        if (cg.adj[i][mi] == 0 || cg.adj[j][mi] == 0) continue;
        auto it = witnesses.find(key_of(covers[i], covers[j]));
        if (it == witnesses.end()) continue;
        const CrossCoverWitness& w = it->second;
        const Cover& mid = covers[mi];
        if (std::find(w.separator.begin(), w.separator.end(), mid) !=
            w.separator.end())
          continue;
        bool parents_both = true;
        for (const Cover* end : {&covers[i], &covers[j]}) {
          NodeSet pa = relatives(g, end->members, Relation::Parents);
          if (set_intersection(pa, mid.members).empty()) parents_both = false;
        }
        if (parents_both) continue;
        ElementSet a_plus = w.a;
        a_plus.push_back(SetElement::make_cover(mid));
        ElementSet b_plus = w.b;
        b_plus.push_back(SetElement::make_cover(mid));
        auto sa = resolve_surrogates(g, a_plus, w.b);
        auto sb = resolve_surrogates(g, w.a, b_plus);
        if (!sa || !sb) continue;
        int k1 = provider.rank(sa->first, sa->second);
        int k2 = provider.rank(sb->first, sb->second);
        if (w.rank < std::min(k1, k2)) {
          cg.adj[i][mi] = 2;
          cg.adj[mi][i] = 0;
          cg.adj[j][mi] = 2;
          cg.adj[mi][j] = 0;
        }
      }
    }
  }

  meek_closure(cg);
  return rebuild_from_cover_graph(g, cg);
}

HierGraph discover(const NodeSet& measured, RankProvider& provider,
                   const SearchConfig& cfg) {
  HierGraph g = find_causal_clusters(measured, provider, cfg);
  g = refine_clusters(g, provider, cfg);
  g = refine_edges(g, provider, cfg);
  return g;
}

}  // namespace lhcd
