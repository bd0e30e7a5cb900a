#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lhcd/graph.hpp"

namespace lhcd {
namespace fixtures {

// Benchmark graph families. Measured nodes always occupy ids 0..m-1 so a
// discovery run over the same data aligns by id; latents follow. Cover
// annotations mark the discoverable latent units.

// Two-layer hierarchy, 16 measured / 10 latents, with a merged 2-cover in
// the middle layer and overlapping child blocks.
HierGraph two_layer_shared16();

// Hierarchy with single-latent middle covers, direct measured children at
// every level and one doubly-parented measured leaf. 13 measured.
HierGraph asymmetric_hierarchy13();

// Four 1-covers in a diamond with a collider at the bottom. 8 measured.
HierGraph collider_diamond8();

// Star of three 1-covers whose measured children form a bond set over the
// two outer 2-cover blocks. 11 measured.
HierGraph bond_star11();

// Chain of a mergeable 1-cover over a 3-cover. 10 measured; exercises the
// reduction and completion operators.
HierGraph deep_chain10();

// Plain tree, 24 measured / 11 latents.
HierGraph tree24();

// Measurement model: every latent has three measured children, diamond
// over four latents. 12 measured.
HierGraph measurement12();

// Wide two-branch hierarchy, 22 measured / 15 latents.
HierGraph wide_hierarchy22();

// Two root latents jointly covering six child covers plus two direct
// leaves. 14 measured.
HierGraph double_root14();

// Two overlapping 1-covers sharing one child. 5 measured.
HierGraph overlap_pair5();

// Partly overlapping covers that break the nesting requirement. 9
// measured; intentionally not identifiable.
HierGraph overlap_invalid9();

// Phase-one output shape for bond_star11 before refinement: a 2-cover over
// the bond set with the outer blocks hanging below.
HierGraph bond_star11_greedy();

// Families available to the replication harness.
std::vector<std::string> family_names();
// n-th graph of a family ("measurement", "tree", "il2h"); the il2h family
// rotates through the hierarchy fixtures.
HierGraph family_graph(const std::string& family, int index);

// Seeded random graph satisfying the identifiability conditions, at most
// max_nodes nodes in total. Deterministic in seed.
HierGraph random_il2h(std::uint64_t seed, int max_nodes = 12);

}  // namespace fixtures
}  // namespace lhcd
