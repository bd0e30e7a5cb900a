#include <algorithm>
#include <random>

#include "doctest.h"
#include "lhcd/fixtures.hpp"
#include "lhcd/graph.hpp"

using namespace lhcd;

namespace {

// Independent transitive-closure oracle: boolean matrix powers.
NodeSet descendants_by_closure(const HierGraph& g, NodeId v) {
  int n = g.node_count();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const auto& [a, b] : g.directed_edges()) reach[a][b] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  NodeSet out;
  for (int j = 0; j < n; ++j)
    if (reach[v][j]) out.push_back(j);
  return out;
}

// Direct recursion oracle for measured pure descendants.
NodeSet mpd_by_recursion(const HierGraph& g, const NodeSet& l) {
  NodeSet closure = l;
  bool grew = true;
  while (grew) {
    grew = false;
    for (NodeId v : g.nodes()) {
      if (set_contains(closure, v)) continue;
      const NodeSet& pa = g.parents(v);
      if (!pa.empty() && is_subset(pa, closure)) {
        set_insert(closure, v);
        grew = true;
      }
    }
  }
  NodeSet out;
  for (NodeId v : set_difference(closure, l))
    if (g.is_measured(v)) out.push_back(v);
  return out;
}

HierGraph random_dag(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  HierGraph g;
  for (int i = 0; i < n; ++i)
    g.add_node(i < n / 2 ? NodeKind::Latent : NodeKind::Measured);
  std::uniform_int_distribution<int> coin(0, 3);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (g.is_latent(i) && coin(rng) == 0) g.add_edge(i, j);
  return g;
}

NodeId by_name(const HierGraph& g, const std::string& name) {
  for (NodeId v : g.nodes())
    if (g.name(v) == name) return v;
  throw std::runtime_error("no node " + name);
}

}  // namespace

TEST_CASE("relatives on the two-layer fixture") {
  HierGraph g = fixtures::two_layer_shared16();
  NodeId x1 = by_name(g, "X1");
  NodeId l6 = by_name(g, "L6");
  CHECK(relatives(g, {x1}, Relation::Parents) == NodeSet{l6});
  CHECK(relatives(g, {x1}, Relation::Descendants).empty());

  NodeId l2 = by_name(g, "L2");
  NodeSet gp = relatives(g, {l6}, Relation::Grandparents);
  CHECK(set_contains(gp, by_name(g, "L1")));
  NodeSet sib = relatives(g, {l6}, Relation::Siblings);
  CHECK(set_contains(sib, by_name(g, "L7")));
  CHECK(!set_contains(sib, l6));
  CHECK(set_contains(relatives(g, {x1}, Relation::Siblings), by_name(g, "X2")));
  (void)l2;
}

TEST_CASE("relatives rejects unknown ids") {
  HierGraph g = fixtures::measurement12();
  CHECK_THROWS_AS(relatives(g, {999}, Relation::Parents), InputError);
}

TEST_CASE("descendants agree with a transitive-closure oracle") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    HierGraph g = random_dag(seed, 8 + static_cast<int>(seed % 5));
    for (NodeId v : g.nodes())
      CHECK(relatives(g, {v}, Relation::Descendants) ==
            descendants_by_closure(g, v));
  }
}

TEST_CASE("pure children of the middle pair") {
  HierGraph g = fixtures::two_layer_shared16();
  NodeSet pair{by_name(g, "L2"), by_name(g, "L3")};
  std::sort(pair.begin(), pair.end());
  NodeSet pch = pure_children(g, pair);
  NodeSet expect;
  for (const char* n : {"L6", "L7", "L8", "L9", "L10"})
    set_insert(expect, by_name(g, n));
  CHECK(pch == expect);
}

TEST_CASE("pure children of a single latent with shared block") {
  HierGraph g = fixtures::two_layer_shared16();
  NodeSet l7{by_name(g, "L7")};
  NodeSet expect{by_name(g, "X4"), by_name(g, "X5")};
  std::sort(expect.begin(), expect.end());
  CHECK(pure_children(g, l7) == expect);
}

TEST_CASE("pure children of all roots with a fully shared child set") {
  HierGraph g;
  NodeId x1 = g.add_node(NodeKind::Measured);
  NodeId x2 = g.add_node(NodeKind::Measured);
  NodeId a = g.add_node(NodeKind::Latent);
  NodeId b = g.add_node(NodeKind::Latent);
  for (NodeId l : {a, b})
    for (NodeId x : {x1, x2}) g.add_edge(l, x);
  CHECK(pure_children(g, {a, b}) == NodeSet{x1, x2});
}

TEST_CASE("measured pure descendants of the middle pair span the left block") {
  HierGraph g = fixtures::two_layer_shared16();
  Cover pair({by_name(g, "L2"), by_name(g, "L3")});
  std::sort(pair.members.begin(), pair.members.end());
  ElementSet v{SetElement::make_cover(pair)};
  NodeSet mpd = measured_pure_descendants(g, v);
  NodeSet expect;
  for (int i = 1; i <= 11; ++i) set_insert(expect, by_name(g, "X" + std::to_string(i)));
  CHECK(mpd == expect);
}

TEST_CASE("a measured element is its own surrogate") {
  HierGraph g = fixtures::measurement12();
  NodeId x3 = by_name(g, "X3");
  ElementSet v{SetElement::make_measured(x3)};
  CHECK(measured_pure_descendants(g, v) == NodeSet{x3});
}

TEST_CASE("measured pure descendants match the recursion oracle") {
  for (std::uint64_t seed = 3; seed <= 12; ++seed) {
    HierGraph g = fixtures::random_il2h(seed);
    for (NodeId l : g.latent_nodes())
      CHECK(measured_pure_descendants(g, NodeSet{l}) == mpd_by_recursion(g, {l}));
  }
}

TEST_CASE("measured pure descendants are monotone") {
  HierGraph g = fixtures::two_layer_shared16();
  NodeSet small{by_name(g, "L2")};
  NodeSet big{by_name(g, "L2"), by_name(g, "L3")};
  std::sort(big.begin(), big.end());
  CHECK(is_subset(measured_pure_descendants(g, small),
                  measured_pure_descendants(g, big)));
}

TEST_CASE("effective cardinality of the shared block pair is 3") {
  HierGraph g = fixtures::two_layer_shared16();
  Cover pair({by_name(g, "L7"), by_name(g, "L8")});
  std::sort(pair.members.begin(), pair.members.end());
  CHECK(effective_cardinality(g, pair) == 3);
}

TEST_CASE("fully connected pure children keep their cardinality") {
  HierGraph g = fixtures::two_layer_shared16();
  Cover pair({by_name(g, "L4"), by_name(g, "L5")});
  std::sort(pair.members.begin(), pair.members.end());
  CHECK(effective_cardinality(g, pair) ==
        static_cast<int>(pure_children(g, pair.members).size()));
}

TEST_CASE("singleton cover never collapses") {
  HierGraph g = fixtures::measurement12();
  Cover l4({by_name(g, "L4")});
  CHECK(effective_cardinality(g, l4) == 3);
}

TEST_CASE("effective cardinality never exceeds the pure-children count") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    HierGraph g = fixtures::random_il2h(seed);
    for (const auto& c : g.covers()) {
      if (pure_children(g, c.members).empty()) continue;
      CHECK(effective_cardinality(g, c) <=
            static_cast<int>(pure_children(g, c.members).size()));
    }
  }
}

TEST_CASE("middle pair is a latent atomic cover") {
  HierGraph g = fixtures::two_layer_shared16();
  Cover pair({by_name(g, "L2"), by_name(g, "L3")});
  std::sort(pair.members.begin(), pair.members.end());
  CHECK(is_latent_atomic_cover(g, pair));
}

TEST_CASE("overlapping pair forms one atomic cover") {
  HierGraph g = fixtures::overlap_pair5();
  Cover pair({by_name(g, "L1"), by_name(g, "L2")});
  std::sort(pair.members.begin(), pair.members.end());
  CHECK(is_latent_atomic_cover(g, pair));
}

TEST_CASE("a latent with a single child is no atomic cover") {
  HierGraph g;
  NodeId x = g.add_node(NodeKind::Measured);
  NodeId l = g.add_node(NodeKind::Latent);
  g.add_edge(l, x);
  CHECK(!is_latent_atomic_cover(g, Cover({l})));
}

TEST_CASE("atomic covers have enough pure children") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    HierGraph g = fixtures::random_il2h(seed);
    for (const auto& c : g.covers())
      if (is_latent_atomic_cover(g, c))
        CHECK(static_cast<int>(pure_children(g, c.members).size()) >=
              c.size() + 1);
  }
}

TEST_CASE("structural validation accepts the flagship fixtures") {
  CHECK(validate_il2h(fixtures::two_layer_shared16()).empty());

  HierGraph single;
  NodeId l = single.add_node(NodeKind::Latent);
  for (int i = 0; i < 3; ++i)
    single.add_edge(l, single.add_node(NodeKind::Measured));
  CHECK(validate_il2h(single).empty());
}

TEST_CASE("partly overlapping covers violate the nesting clause") {
  auto violations = validate_il2h(fixtures::overlap_invalid9());
  bool clause2 = false;
  for (const auto& v : violations)
    if (v.clause == 2) clause2 = true;
  CHECK(clause2);
}

TEST_CASE("set size counts elements and variables") {
  HierGraph g = fixtures::two_layer_shared16();
  ElementSet s;
  s.push_back(SetElement::make_cover(Cover({by_name(g, "L1")})));
  s.push_back(SetElement::make_cover(Cover({by_name(g, "L6")})));
  Cover c78({by_name(g, "L7"), by_name(g, "L8")});
  std::sort(c78.members.begin(), c78.members.end());
  s.push_back(SetElement::make_cover(c78));
  Cover c910({by_name(g, "L9"), by_name(g, "L10")});
  std::sort(c910.members.begin(), c910.members.end());
  s.push_back(SetElement::make_cover(c910));
  auto [count, vars] = set_size(s);
  CHECK(count == 4);
  CHECK(vars == 6);

  CHECK(set_size({}) == std::pair<int, int>{0, 0});

  ElementSet singles;
  for (int i = 0; i < 3; ++i)
    singles.push_back(SetElement::make_measured(i));
  auto [c2, v2] = set_size(singles);
  CHECK(c2 == v2);
}

TEST_CASE("measured nodes reject outgoing edges") {
  HierGraph g;
  NodeId x = g.add_node(NodeKind::Measured);
  NodeId l = g.add_node(NodeKind::Latent);
  CHECK_THROWS_AS(g.add_edge(x, l), InputError);
}
