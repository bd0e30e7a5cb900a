#pragma once

#include "lhcd/graph.hpp"

namespace lhcd {

// Repeatedly merges a cover into its parent cover when the cover is a pure
// child of the parent, the sizes match, and either its pure children or
// its siblings form one latent atomic cover. Fixpoint result.
HierGraph minimal_graph_operator(const HierGraph& g);

// Completes every cover's block: each cover member gains an edge to each
// pure child of the cover. Idempotent.
HierGraph skeleton_operator(const HierGraph& g);

// Directed edges between covers become undirected unless they head a
// collider among covers; edges into measured nodes stay directed.
HierGraph to_mec(const HierGraph& g);

// Equality up to latent relabeling: same measured nodes, a latent
// bijection making skeletons equal, same cover partition, and the same
// cover-level v-structures.
bool mec_equal(const HierGraph& g1, const HierGraph& g2);

}  // namespace lhcd
