#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lhcd/graph.hpp"
#include "lhcd/provider.hpp"

namespace lhcd {

struct SearchConfig {
  // Largest cover size attempted by the greedy search.
  int max_cover_size = 4;
  // Test sets are drawn with k+1 <= ||A|| <= k+1+extra_test_width.
  int extra_test_width = 1;
  // Cap on enumerated substitution subsets per frontier sweep.
  long max_subst_subsets = 4096;
  // Cap on enumerated test subsets per sweep; exceeding it raises a
  // capacity error naming the frontier.
  long max_test_subsets = 200000;
  // Partition enumeration cap per separator cover in the edge phase.
  int max_partitions = 64;
  // Refinement splice budget (loop guard).
  int max_refinement_rounds = 64;
  // Optional trace sink for search events.
  std::function<void(const std::string&)> trace;
};

// The evolving search state: estimated graph plus the active frontier.
struct DiscoveryState {
  HierGraph graph;
  ElementSet active;
  int k = 1;
};

// Rank of the surrogate block of elements a against b, as the provider
// sees it: both sides are replaced by their measured pure descendants in
// the current graph. Returns nullopt when either surrogate set is empty
// or the two overlap (the query is then meaningless).
std::optional<int> surrogate_rank(const HierGraph& g, RankProvider& provider,
                                  const ElementSet& a, const ElementSet& b);

// One rank-deficiency probe of the first phase: returns the deficient rank
// k' if a is atomically rank-deficient against the remainder of the
// frontier at stage k, otherwise nullopt.
std::optional<int> atomic_rank_deficient(const HierGraph& g,
                                         RankProvider& provider,
                                         const ElementSet& frontier,
                                         const ElementSet& a, int k);

// Phase one: greedy recursive discovery of rank-deficient clusters over
// the measured variables. The result contains the given measured nodes
// (same ids) plus created latent covers.
HierGraph find_causal_clusters(const NodeSet& measured, RankProvider& provider,
                               const SearchConfig& cfg = {});

// Reverses the edges into l so the cover becomes a root. Throws on the
// (structurally impossible) case that a cycle would appear.
HierGraph make_root(const HierGraph& g, const Cover& l);

// Phase two: breadth-first correction of covers created over bond sets.
HierGraph refine_clusters(const HierGraph& g, RankProvider& provider,
                          const SearchConfig& cfg = {});

// Undirected edges among covers, keyed by cover member sets.
struct EdgeSet {
  std::vector<std::pair<Cover, Cover>> edges;
  bool has(const Cover& a, const Cover& b) const;
  void remove(const Cover& a, const Cover& b);
};

struct ColliderSet {
  // (a, c, b) meaning a -> c <- b; (a,c,b) and (b,c,a) are the same entry.
  std::vector<std::tuple<Cover, Cover, Cover>> items;
};

struct CrossCoverWitness {
  ElementSet a;
  ElementSet b;
  int rank = 0;
  std::vector<Cover> separator;
};

struct CrossCoverResult {
  EdgeSet edges;
  // Witness per removed pair, keyed like the edge list.
  std::vector<std::pair<std::pair<Cover, Cover>, CrossCoverWitness>> witnesses;
};

// Pairwise separation tests among the covers of s, starting from a fully
// connected edge set; g must already be prepared (test cover made root).
CrossCoverResult cross_cover_test(const std::vector<Cover>& s,
                                  const HierGraph& g, RankProvider& provider,
                                  const SearchConfig& cfg = {});

// V-structure tests over unshielded triples of e, using the witnesses
// recorded by cross_cover_test.
ColliderSet find_colliders(const std::vector<Cover>& s,
                           const CrossCoverResult& e, const HierGraph& g,
                           RankProvider& provider,
                           const SearchConfig& cfg = {});

// Phase three: local correction of edges among covers, collider discovery
// and Meek propagation; returns the equivalence-class form.
HierGraph refine_edges(const HierGraph& g, RankProvider& provider,
                       const SearchConfig& cfg = {});

// Closes orientations under the four Meek rules at the cover level.
// Undirected latent-latent edges may become directed; nothing else moves.
HierGraph apply_meek_rules(const HierGraph& g);

// All three phases in sequence.
HierGraph discover(const NodeSet& measured, RankProvider& provider,
                   const SearchConfig& cfg = {});

}  // namespace lhcd
