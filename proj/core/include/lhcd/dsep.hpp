#pragma once

#include <optional>

#include "lhcd/graph.hpp"

namespace lhcd {

// A pair of element sets whose cross-covariance rank is in question.
struct RankQuery {
  ElementSet a;
  ElementSet b;
};

struct DsepOptions {
  // Max latent count admitted to subset enumeration.
  int max_latents = 20;
};

// True iff z blocks every path between a and b under the collider rules.
// Computed on the ancestral moral graph.
bool d_separated(const HierGraph& g, const NodeSet& a, const NodeSet& b,
                 const NodeSet& z);

struct MinSepResult {
  int cardinality = 0;
  NodeSet witness;  // lexicographically first separator of that size
  // min(|X_A|, |X_B|) <= cardinality means the question sits outside the
  // regime where the separator size equals a covariance rank.
  bool outside_rank_regime = false;
};

// Smallest latent subset d-separating the measured surrogates of q.a from
// those of q.b; subsets scanned ascending by (cardinality, lexicographic).
// Returns nullopt when no latent subset separates (only possible with
// overlapping or adjacent endpoint sets).
std::optional<MinSepResult> min_dsep(const HierGraph& g, const NodeSet& xa,
                                     const NodeSet& xb,
                                     const DsepOptions& opt = {});

int min_dsep_cardinality(const HierGraph& g, const RankQuery& q,
                         const DsepOptions& opt = {});

// Rank of the abstract cross-covariance of q: every element is replaced by
// its measured pure descendants, then the minimal-separator size is taken,
// capped at full rank. Throws when a latent element fails the surrogate
// requirement (its measures not separated from the rest by the element).
int graphical_rank(const HierGraph& g, const RankQuery& q,
                   const DsepOptions& opt = {});

// True iff a minimal latent separator of x from the other measures also
// splits those other measures into two nonempty separated groups.
bool is_bond_set(const HierGraph& g, const NodeSet& x,
                 const DsepOptions& opt = {});

}  // namespace lhcd
