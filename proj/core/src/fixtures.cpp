#include "lhcd/fixtures.hpp"

#include <map>
#include <random>

namespace lhcd {
namespace fixtures {

namespace {

// Small builder: measured nodes X1..Xm first, then latents L1..Ln; edges
// and covers named through the latent/measured index maps.
struct Builder {
  HierGraph g;
  std::map<int, NodeId> x;  // 1-based measured index -> id
  std::map<int, NodeId> l;  // 1-based latent index -> id

  explicit Builder(int measured) {
    for (int i = 1; i <= measured; ++i)
      x[i] = g.add_node(NodeKind::Measured, "X" + std::to_string(i));
  }
  void latents(int count) {
    for (int i = 1; i <= count; ++i)
      l[i] = g.add_node(NodeKind::Latent, "L" + std::to_string(i));
  }
  void lx(int from, std::initializer_list<int> to) {
    for (int t : to) g.add_edge(l[from], x[t]);
  }
  void ll(int from, std::initializer_list<int> to) {
    for (int t : to) g.add_edge(l[from], l[t]);
  }
  void cover(std::initializer_list<int> members) {
    NodeSet m;
    for (int i : members) set_insert(m, l[i]);
    g.add_cover(Cover(m));
  }
};

}  // namespace

HierGraph two_layer_shared16() {
  Builder b(16);
  b.latents(10);
  b.ll(1, {2, 3, 4, 5});
  b.ll(2, {6, 7, 8, 9, 10});
  b.ll(3, {7, 8, 9});
  b.lx(4, {12, 13, 14, 15, 16});
  b.lx(5, {12, 13, 14, 15, 16});
  b.lx(6, {1, 2, 3});
  b.lx(7, {4, 5, 6, 7});
  b.lx(8, {6, 7});
  b.lx(9, {8, 9, 10, 11});
  b.lx(10, {8, 9, 10, 11});
  b.cover({1});
  b.cover({2, 3});
  b.cover({4, 5});
  b.cover({6});
  b.cover({7, 8});
  b.cover({9, 10});
  return b.g;
}

HierGraph asymmetric_hierarchy13() {
  // Measured X1..X13 stand for X0..X12 of the narrative ordering.
  Builder b(13);
  b.latents(7);
  b.ll(1, {2, 3});
  b.lx(1, {1, 2});     // two direct leaves of the root
  b.ll(2, {4, 5, 6});
  b.lx(2, {5});
  b.ll(3, {4, 5, 7});
  b.lx(3, {6});
  b.lx(4, {7, 8, 9, 10});
  b.lx(5, {7, 8, 9, 10});
  b.lx(6, {11, 12, 13});
  b.lx(7, {13, 3, 4});
  b.cover({1});
  b.cover({2, 3});
  b.cover({4, 5});
  b.cover({6});
  b.cover({7});
  return b.g;
}

HierGraph collider_diamond8() {
  Builder b(8);
  b.latents(4);
  b.ll(1, {2, 3});
  b.ll(2, {4});
  b.ll(3, {4});
  b.lx(1, {1, 2});
  b.lx(2, {3, 4});
  b.lx(3, {5, 6});
  b.lx(4, {7, 8});
  b.cover({1});
  b.cover({2});
  b.cover({3});
  b.cover({4});
  return b.g;
}

HierGraph bond_star11() {
  Builder b(11);
  b.latents(7);
  b.ll(1, {2, 3});
  b.ll(2, {4, 5});
  b.ll(3, {6, 7});
  b.lx(2, {9});
  b.lx(1, {10});
  b.lx(3, {11});
  b.lx(4, {1, 2, 3, 4});
  b.lx(5, {1, 2, 3, 4});
  b.lx(6, {5, 6, 7, 8});
  b.lx(7, {5, 6, 7, 8});
  b.cover({1});
  b.cover({2});
  b.cover({3});
  b.cover({4, 5});
  b.cover({6, 7});
  return b.g;
}

HierGraph bond_star11_greedy() {
  // The greedy first-phase result on bond_star11: a 2-cover over the bond
  // set {X9, X10, X11}, 1-covers over the blocks, hierarchy inverted.
  Builder b(11);
  b.latents(8);  // L1,L2 top pair; L7,L8 mid; L3,L4 and L5,L6 blocks
  b.ll(1, {7, 8});
  b.ll(2, {7, 8});
  b.lx(1, {9, 10, 11});
  b.lx(2, {9, 10, 11});
  b.ll(8, {3, 4});
  b.ll(7, {5, 6});
  b.lx(3, {1, 2, 3, 4});
  b.lx(4, {1, 2, 3, 4});
  b.lx(5, {5, 6, 7, 8});
  b.lx(6, {5, 6, 7, 8});
  b.cover({1, 2});
  b.cover({7});
  b.cover({8});
  b.cover({3, 4});
  b.cover({5, 6});
  return b.g;
}

HierGraph deep_chain10() {
  Builder b(10);
  b.latents(5);
  b.ll(5, {4});
  b.lx(5, {8, 9, 10});
  b.ll(4, {1, 2, 3});
  b.lx(1, {1, 2, 3, 4, 5, 6});
  b.lx(2, {1, 2, 3, 4, 5, 6, 7});
  b.lx(3, {2, 3, 4, 5, 6, 7});
  b.cover({5});
  b.cover({4});
  b.cover({1, 2, 3});
  return b.g;
}

HierGraph tree24() {
  Builder b(24);
  b.latents(11);
  b.ll(1, {2, 3, 4, 5});
  b.ll(5, {6, 7, 8});
  b.ll(8, {9, 10, 11});
  b.lx(2, {1, 2, 3});
  b.lx(3, {4, 5, 6});
  b.lx(4, {7, 8, 9});
  b.lx(6, {10, 11, 12});
  b.lx(7, {13, 14, 15});
  b.lx(9, {16, 17, 18});
  b.lx(10, {19, 20, 21});
  b.lx(11, {22, 23, 24});
  for (int i = 1; i <= 11; ++i) b.cover({i});
  return b.g;
}

HierGraph measurement12() {
  Builder b(12);
  b.latents(4);
  b.ll(1, {2, 3});
  b.ll(2, {4});
  b.ll(3, {4});
  b.lx(1, {1, 2, 3});
  b.lx(2, {4, 5, 6});
  b.lx(3, {7, 8, 9});
  b.lx(4, {10, 11, 12});
  for (int i = 1; i <= 4; ++i) b.cover({i});
  return b.g;
}

HierGraph wide_hierarchy22() {
  Builder b(22);
  b.latents(15);
  b.ll(1, {2, 3, 4, 5});
  b.ll(2, {6, 7, 8, 9});
  b.ll(3, {7, 8, 9, 10});
  b.ll(4, {11, 12, 13, 14});
  b.ll(5, {12, 13, 14, 15});
  b.lx(6, {1, 2, 3});
  b.lx(7, {4, 5, 6, 7});
  b.lx(8, {5, 6, 7});
  b.lx(9, {8, 9, 10, 11});
  b.lx(10, {10, 11});
  b.lx(11, {12, 13, 14});
  b.lx(12, {15, 16, 17, 18});
  b.lx(13, {16, 17, 18});
  b.lx(14, {19, 20, 21, 22});
  b.lx(15, {21, 22});
  b.cover({1});
  b.cover({2, 3});
  b.cover({4, 5});
  b.cover({6});
  b.cover({7, 8});
  b.cover({9, 10});
  b.cover({11});
  b.cover({12, 13});
  b.cover({14, 15});
  return b.g;
}

HierGraph double_root14() {
  Builder b(14);
  b.latents(8);
  b.ll(1, {3, 4, 5, 6, 7, 8});
  b.ll(2, {3, 4, 5, 6, 7, 8});
  b.lx(1, {7});
  b.lx(2, {8});
  b.lx(3, {1, 2});
  b.lx(4, {3, 4});
  b.lx(5, {5, 6});
  b.lx(6, {9, 10});
  b.lx(7, {11, 12, 13, 14});
  b.lx(8, {11, 12, 13, 14});
  b.cover({1, 2});
  b.cover({3});
  b.cover({4});
  b.cover({5});
  b.cover({6});
  b.cover({7, 8});
  return b.g;
}

HierGraph overlap_pair5() {
  Builder b(5);
  b.latents(2);
  b.lx(1, {1, 2, 3});
  b.lx(2, {3, 4, 5});
  b.cover({1, 2});
  return b.g;
}

HierGraph overlap_invalid9() {
  Builder b(9);
  b.latents(7);
  b.ll(1, {3, 4, 5, 6, 7});
  b.ll(2, {3, 4, 5, 6, 7});
  b.lx(3, {1, 2});
  b.lx(4, {1, 2, 3, 4, 5});
  b.lx(5, {4, 5});
  b.lx(6, {6, 7, 8, 9});
  b.lx(7, {6, 7, 8, 9});
  b.cover({1, 2});
  b.cover({3, 4});
  b.cover({4, 5});
  b.cover({6, 7});
  return b.g;
}

std::vector<std::string> family_names() {
  return {"measurement", "tree", "il2h"};
}

HierGraph family_graph(const std::string& family, int index) {
  if (family == "measurement") return measurement12();
  if (family == "tree") return tree24();
  if (family == "il2h") {
    switch (index % 4) {
      case 0: return two_layer_shared16();
      case 1: return asymmetric_hierarchy13();
      case 2: return wide_hierarchy22();
      default: return double_root14();
    }
  }
  throw InputError("unknown graph family '" + family + "'");
}

HierGraph random_il2h(std::uint64_t seed, int max_nodes) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 1);
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  // Two or three leaf clusters under a single root latent; cluster covers
  // are 1- or 2-sized with enough measured children, trimmed to the node
  // budget. Shapes drawn from this family always satisfy the conditions.
  int clusters = pick(2, 3);
  std::vector<int> csize(clusters), kids(clusters);
  int total;
  do {
    total = 1;  // root
    for (int i = 0; i < clusters; ++i) {
      csize[i] = pick(1, 2);
      kids[i] = csize[i] + 1 + pick(0, 1);
      total += csize[i] + kids[i];
    }
  } while (total > max_nodes);

  int measured = 0;
  for (int i = 0; i < clusters; ++i) measured += kids[i];
  Builder b(measured);
  int latent_count = 1;
  for (int i = 0; i < clusters; ++i) latent_count += csize[i];
  b.latents(latent_count);

  int next_x = 1;
  int next_l = 2;  // latent 1 is the root
  b.cover({1});
  for (int i = 0; i < clusters; ++i) {
    std::vector<int> members;
    for (int t = 0; t < csize[i]; ++t) members.push_back(next_l++);
    NodeSet cover_ids;
    for (int m : members) {
      b.ll(1, {m});
      set_insert(cover_ids, b.l[m]);
    }
    b.g.add_cover(Cover(cover_ids));
    for (int t = 0; t < kids[i]; ++t) {
      for (int m : members) b.lx(m, {next_x});
      ++next_x;
    }
  }
  return b.g;
}

}  // namespace fixtures
}  // namespace lhcd
