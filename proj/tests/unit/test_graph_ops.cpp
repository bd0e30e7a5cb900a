#include "doctest.h"
#include "lhcd/dsep.hpp"
#include "lhcd/fixtures.hpp"
#include "lhcd/graph_ops.hpp"
#include "lhcd/provider.hpp"

using namespace lhcd;

namespace {

NodeId by_name(const HierGraph& g, const std::string& name) {
  for (NodeId v : g.nodes())
    if (g.name(v) == name) return v;
  throw std::runtime_error("no node " + name);
}

// All small-footprint measured rank queries agree between two graphs.
bool rank_equivalent(const HierGraph& g1, const HierGraph& g2) {
  NodeSet m1 = g1.measured_nodes();
  if (m1 != g2.measured_nodes()) return false;
  OracleRankProvider p1{g1}, p2{g2};
  for (size_t i = 0; i < m1.size(); ++i)
    for (size_t j = i + 1; j < m1.size(); ++j) {
      NodeSet a{m1[i], m1[j]};
      NodeSet b = set_difference(m1, a);
      if (b.empty()) continue;
      if (p1.rank(a, b) != p2.rank(a, b)) return false;
      // A handful of wider splits as well.
      if (j == i + 1 && b.size() >= 3) {
        NodeSet a3 = a;
        set_insert(a3, b[0]);
        NodeSet b3 = set_difference(m1, a3);
        if (!b3.empty() && p1.rank(a3, b3) != p2.rank(a3, b3)) return false;
      }
    }
  return true;
}

}  // namespace

TEST_CASE("reduction merges the chain cover into its parent") {
  HierGraph g = fixtures::deep_chain10();
  HierGraph r = minimal_graph_operator(g);
  // L4 disappears; L5 adopts L1, L2, L3.
  CHECK(r.latent_nodes().size() == g.latent_nodes().size() - 1);
  NodeId l5 = by_name(r, "L5");
  NodeId l1 = by_name(r, "L1");
  CHECK(r.has_edge(l5, l1));
  CHECK(rank_equivalent(g, r));
}

TEST_CASE("reduction is identity without mergeable covers") {
  HierGraph g = fixtures::measurement12();
  CHECK(minimal_graph_operator(g) == g);
  HierGraph h = fixtures::two_layer_shared16();
  CHECK(minimal_graph_operator(h) == h);
}

TEST_CASE("completion fills the merged block") {
  HierGraph g = minimal_graph_operator(fixtures::deep_chain10());
  HierGraph s = skeleton_operator(g);
  NodeId l1 = by_name(s, "L1");
  NodeId l3 = by_name(s, "L3");
  NodeId x7 = by_name(s, "X7");
  NodeId x1 = by_name(s, "X1");
  CHECK(s.has_edge(l1, x7));
  CHECK(s.has_edge(l3, x1));
  // Idempotent.
  CHECK(skeleton_operator(s) == s);
  CHECK(rank_equivalent(g, s));
}

TEST_CASE("completion is identity on complete blocks") {
  HierGraph g = fixtures::measurement12();
  CHECK(skeleton_operator(g) == g);
}

TEST_CASE("mec equality basics") {
  HierGraph g = fixtures::collider_diamond8();
  CHECK(mec_equal(g, g));

  // Relabeled latents still compare equal.
  HierGraph h = fixtures::collider_diamond8();
  CHECK(mec_equal(g, h));

  // Removing the collider breaks equivalence.
  HierGraph k = fixtures::collider_diamond8();
  NodeId l3 = by_name(k, "L3");
  NodeId l4 = by_name(k, "L4");
  k.remove_edge(l3, l4);
  NodeId l1 = by_name(k, "L1");
  k.add_edge(l1, l4);
  CHECK(!mec_equal(g, k));
}

TEST_CASE("mec equality sees the v-structure") {
  // Chain A -> B -> C versus collider A -> B <- C over covers: same
  // skeleton, different compelled edges.
  auto make = [](bool collider) {
    HierGraph g;
    NodeSet xs;
    for (int i = 0; i < 6; ++i) xs.push_back(g.add_node(NodeKind::Measured));
    NodeId a = g.add_node(NodeKind::Latent, "A");
    NodeId b = g.add_node(NodeKind::Latent, "B");
    NodeId c = g.add_node(NodeKind::Latent, "C");
    for (int i = 0; i < 2; ++i) g.add_edge(a, xs[i]);
    for (int i = 2; i < 4; ++i) g.add_edge(b, xs[i]);
    for (int i = 4; i < 6; ++i) g.add_edge(c, xs[i]);
    if (collider) {
      g.add_edge(a, b);
      g.add_edge(c, b);
    } else {
      g.add_edge(a, b);
      g.add_edge(b, c);
    }
    g.add_cover(Cover({a}));
    g.add_cover(Cover({b}));
    g.add_cover(Cover({c}));
    return g;
  };
  CHECK(!mec_equal(make(true), make(false)));
  CHECK(mec_equal(make(false), make(false)));
}

TEST_CASE("rank equivalence of the composed operators") {
  HierGraph g = fixtures::deep_chain10();
  HierGraph ref = skeleton_operator(minimal_graph_operator(g));
  CHECK(rank_equivalent(g, ref));
}
