// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "treeforge/amalgam.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <set>

#include "oracles.hpp"
#include "treeforge/core.hpp"
#include "treeforge/enumerate.hpp"
#include "treeforge/mutation.hpp"

namespace treeforge {
namespace {

std::vector<int> identity(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

MixedStructure empty_base(Flavor f, bool relational) {
  return MixedStructure(f, {}, {}, kNone, kNone, relational);
}

// Checks an amalgam with the brute-force oracles only.
void expect_strong_amalgam(const MixedStructure& c, const MixedStructure& a,
                           const std::vector<int>& f, const MixedStructure& b,
                           const std::vector<int>& g, const AmalgamResult& r) {
  const auto& d = r.amalgam;
  ASSERT_TRUE(oracle::is_tree(d));
  ASSERT_TRUE(oracle::is_embedding(a, d, r.left));
  ASSERT_TRUE(oracle::is_embedding(b, d, r.right));
  for (int i = 0; i < c.size(); ++i) {
    ASSERT_EQ(r.left[f[i]], r.right[g[i]]);
    ASSERT_EQ(r.base[i], r.left[f[i]]);
  }
  std::set<int> left(r.left.begin(), r.left.end());
  std::set<int> shared;
  for (int y : r.right) {
    if (left.count(y)) shared.insert(y);
  }
  ASSERT_EQ(shared, std::set<int>(r.base.begin(), r.base.end()));
  if (c.size() > 0) {
    ASSERT_EQ(d.size(), a.size() + b.size() - c.size());
  }
}

using Triangle = std::function<void(const MixedStructure&, const MixedStructure&,
                                    const std::vector<int>&,
                                    const MixedStructure&,
                                    const std::vector<int>&)>;

// All triangles C -> A, C -> B with |A|, |B| <= max_n; C ranges over the
// empty base (when the flavor allows it) and the structures of size <= max_n.
size_t for_each_triangle(Flavor flavor, int max_n, bool edges,
                         const Triangle& fn) {
  auto all = enumerate_structures_upto(flavor, max_n, edges);
  std::vector<MixedStructure> bases = all;
  if (flavor != Flavor::kPointed) bases.insert(bases.begin(), empty_base(flavor, edges));
  size_t count = 0;
  for (const auto& c : bases) {
    for (const auto& a : all) {
      if (a.size() < c.size()) continue;
      auto fs = embeddings_between(c, a);
      if (fs.empty()) continue;
      for (const auto& b : all) {
        if (b.size() < c.size()) continue;
        auto gs = embeddings_between(c, b);
        for (const auto& f : fs) {
          for (const auto& g : gs) {
            fn(c, a, f, b, g);
            ++count;
          }
        }
      }
    }
  }
  return count;
}

TEST(TreeAmalgam, IdenticalInputs) {
  MixedStructure s(Flavor::kPlain, {kNone, 0, 1, 0});
  auto id = identity(4);
  auto r = amalgamate_tree(s, s, id, s, id);
  EXPECT_EQ(r.amalgam.size(), 4);
  EXPECT_EQ(r.left, id);
  EXPECT_EQ(r.right, id);
}

TEST(TreeAmalgam, TwoLeavesOverSharedRoot) {
  MixedStructure c(Flavor::kPlain, {kNone});
  MixedStructure a(Flavor::kPlain, {kNone, 0});
  auto r = amalgamate_tree(c, a, {0}, a, {0});
  EXPECT_EQ(r.amalgam.parents(), (std::vector<int>{kNone, 0, 0}));
  EXPECT_TRUE(r.certificate.ok());
}

TEST(TreeAmalgam, EmptyBaseAddsFreshRoot) {
  MixedStructure a(Flavor::kPlain, {kNone, 0});
  auto r = amalgamate_tree(empty_base(Flavor::kPlain, false), a, {}, a, {});
  EXPECT_EQ(r.amalgam.size(), 5);
  EXPECT_EQ(r.amalgam.root(), 4);
  EXPECT_EQ(r.amalgam.meet(1, 3), 4);
}

TEST(TreeAmalgam, GapOrderAPointsBelowBPoints) {
  MixedStructure c(Flavor::kPlain, {kNone});
  MixedStructure a(Flavor::kPlain, {1, kNone});  // 1 < 0
  auto r = amalgamate_tree(c, a, {0}, a, {0});
  // chain: A's new point, then B's new point, then the base node.
  EXPECT_EQ(r.amalgam.root(), 1);
  EXPECT_EQ(r.amalgam.parent(2), 1);
  EXPECT_EQ(r.amalgam.parent(0), 2);
}

TEST(TreeAmalgam, RejectsNonEmbeddings) {
  MixedStructure c(Flavor::kPlain, {kNone, 0, 0});
  MixedStructure chain(Flavor::kPlain, {kNone, 0, 1});
  MixedStructure star = c;
  EXPECT_THROW(amalgamate_tree(c, chain, {0, 1, 2}, star, {0, 1, 2}),
               std::invalid_argument);
}

TEST(TreeAmalgam, SemibranchedEmptyBaseStacksBranches) {
  MixedStructure a(Flavor::kSemibranched, {kNone, 0, 0}, {}, kNone, 1);
  auto r = amalgamate_tree(empty_base(Flavor::kSemibranched, false), a, {}, a, {});
  EXPECT_EQ(r.amalgam.size(), 6);
  EXPECT_EQ(r.amalgam.tip(), 4);
  EXPECT_TRUE(r.amalgam.in_branch(1));
}

TEST(TreeAmalgam, ExhaustiveTrianglesUpToFour) {
  for (Flavor fl : {Flavor::kPlain, Flavor::kPointed, Flavor::kSemibranched}) {
    size_t n = for_each_triangle(fl, 4, false, [](auto& c, auto& a, auto& f,
                                                  auto& b, auto& g) {
      auto r = amalgamate_tree(c, a, f, b, g);
      expect_strong_amalgam(c, a, f, b, g, r);
    });
    EXPECT_GT(n, 0u);
  }
}

TEST(TreeAmalgam, InterleaveMutantIsCaught) {
  ScopedMutant m(Mutant::kAmalgamInterleave);
  MixedStructure c(Flavor::kPlain, {kNone});
  MixedStructure b(Flavor::kPlain, {2, kNone, 1});  // 1 < 2 < 0
  EXPECT_THROW(amalgamate_tree(c, c, {0}, b, {0}), AmalgamError);
}

TEST(TreeAmalgam, IsomorphicInputsGiveIsomorphicOutputs) {
  size_t checked = 0;
  for_each_triangle(Flavor::kPointed, 3, false, [&](auto& c, auto& a, auto& f,
                                                    auto& b, auto& g) {
    auto base = amalgamate_tree(c, a, f, b, g).amalgam;
    // Relabel A by reversing its ids.
    const int n = a.size();
    std::vector<int> rho(n);
    for (int i = 0; i < n; ++i) rho[i] = n - 1 - i;
    std::vector<int> parent(n, kNone);
    for (int i = 0; i < n; ++i) {
      if (a.parent(i) != kNone) parent[rho[i]] = rho[a.parent(i)];
    }
    MixedStructure a2(a.flavor(), parent, {}, rho[a.point()]);
    std::vector<int> f2(f.size());
    for (size_t i = 0; i < f.size(); ++i) f2[i] = rho[f[i]];
    auto other = amalgamate_tree(c, a2, f2, b, g).amalgam;
    ASSERT_EQ(oracle::structure_canonical_form(base),
              oracle::structure_canonical_form(other));
    ++checked;
  });
  EXPECT_GT(checked, 0u);
}

TEST(GraphAmalgam, Examples) {
  Graph one(1, {});
  auto r = amalgamate_graph_free(Graph(0, {}), one, {}, one, {});
  EXPECT_EQ(r.amalgam.n, 2);
  EXPECT_TRUE(r.amalgam.edges.empty());
  Graph ca(2, {{0, 1}});
  auto p = amalgamate_graph_free(one, ca, {0}, ca, {0});
  EXPECT_EQ(p.amalgam.n, 3);
  EXPECT_EQ(p.amalgam.edges, (std::vector<Edge>{{0, 1}, {0, 2}}));
  EXPECT_FALSE(p.amalgam.has_edge(1, 2));
}

std::vector<Graph> all_graphs_upto(int max_n) {
  std::vector<Graph> out;
  for (int n = 0; n <= max_n; ++n) {
    std::vector<Edge> pairs;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
    for (int mask = 0; mask < (1 << pairs.size()); ++mask) {
      std::vector<Edge> e;
      for (size_t k = 0; k < pairs.size(); ++k) {
        if (mask >> k & 1) e.push_back(pairs[k]);
      }
      out.emplace_back(n, e);
    }
  }
  return out;
}

TEST(GraphAmalgam, StrongForAllSmallTriangles) {
  auto graphs = all_graphs_upto(3);
  auto big = all_graphs_upto(4);
  size_t checked = 0;
  for (const auto& c : graphs) {
    if (c.n > 2) continue;
    for (const auto& a : big) {
      for (const auto& b : graphs) {
        if (a.n < c.n || b.n < c.n) continue;
        std::vector<int> f = identity(c.n);
        std::vector<int> g(c.n);
        for (int i = 0; i < c.n; ++i) g[i] = b.n - 1 - i;
        if (!is_graph_embedding(c, a, f) || !is_graph_embedding(c, b, g)) continue;
        auto r = amalgamate_graph_free(c, a, f, b, g);
        std::set<int> left(r.left.begin(), r.left.end());
        std::set<int> shared;
        for (int y : r.right) {
          if (left.count(y)) shared.insert(y);
        }
        ASSERT_EQ(shared, std::set<int>(r.base.begin(), r.base.end()));
        ASSERT_EQ(r.amalgam.n, a.n + b.n - c.n);
        for (int x = 0; x < a.n; ++x) {
          for (int y = 0; y < b.n; ++y) {
            if (!left.count(r.right[y]) && !set_contains(make_set(f), x)) {
              ASSERT_FALSE(r.amalgam.has_edge(r.left[x], r.right[y]));
            }
          }
        }
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(MixedAmalgam, EdgeLeafAndIsolatedLeaf) {
  MixedStructure c(Flavor::kPlain, {kNone}, {}, kNone, kNone, true);
  MixedStructure a(Flavor::kPlain, {kNone, 0}, {{0, 1}});
  MixedStructure b(Flavor::kPlain, {kNone, 0}, {}, kNone, kNone, true);
  auto r = amalgamate_mixed(c, a, {0}, b, {0});
  EXPECT_EQ(r.amalgam.size(), 3);
  EXPECT_EQ(r.amalgam.edges().size(), 1u);
  EXPECT_TRUE(r.certificate.ok());
}

TEST(MixedAmalgam, EmptyLayerAgreesWithTreeAmalgam) {
  MixedStructure c(Flavor::kPlain, {kNone}, {}, kNone, kNone, true);
  MixedStructure a(Flavor::kPlain, {kNone, 0, 0}, {}, kNone, kNone, true);
  auto mixed = amalgamate_mixed(c, a, {0}, a, {0});
  auto tree = amalgamate_tree(tree_reduct(c), tree_reduct(a), {0},
                              tree_reduct(a), {0});
  EXPECT_EQ(mixed.amalgam.parents(), tree.amalgam.parents());
  EXPECT_TRUE(mixed.amalgam.edges().empty());
}

TEST(MixedAmalgam, ExhaustiveTrianglesAndReducts) {
  for (Flavor fl : {Flavor::kPlain, Flavor::kPointed, Flavor::kSemibranched}) {
    const int max_n = 3;
    size_t n = for_each_triangle(fl, max_n, true, [](auto& c, auto& a, auto& f,
                                                     auto& b, auto& g) {
      auto r = amalgamate_mixed(c, a, f, b, g);
      expect_strong_amalgam(c, a, f, b, g, r);
      // Each reduct of the result is a strong amalgam of the reducts.
      auto ga = graph_reduct(a);
      auto gb = graph_reduct(b);
      auto gd = graph_reduct(r.amalgam);
      ASSERT_TRUE(is_graph_embedding(ga, gd, r.left));
      ASSERT_TRUE(is_graph_embedding(gb, gd, r.right));
      ASSERT_TRUE(oracle::is_embedding(tree_reduct(a), tree_reduct(r.amalgam),
                                       r.left));
      for (int x = 0; x < a.size(); ++x) {
        for (int y = 0; y < b.size(); ++y) {
          if (r.left[x] == r.right[y]) continue;
          bool x_base = std::find(f.begin(), f.end(), x) != f.end();
          bool y_base = std::find(g.begin(), g.end(), y) != g.end();
          if (!x_base && !y_base) {
            ASSERT_FALSE(r.amalgam.has_edge(r.left[x], r.right[y]));
          }
        }
      }
    });
    EXPECT_GT(n, 0u);
  }
}

TEST(JointEmbed, Examples) {
  auto one = MixedStructure::singleton(Flavor::kPlain, false);
  auto r = joint_embed(one, one);
  EXPECT_EQ(r.amalgam.size(), 3);
  auto p = MixedStructure::singleton(Flavor::kPointed, false);
  EXPECT_EQ(joint_embed(p, p).amalgam.size(), 1);
  MixedStructure chain(Flavor::kPlain, {kNone, 0});
  auto c = joint_embed(chain, chain);
  EXPECT_EQ(c.amalgam.size(), 5);
  EXPECT_TRUE(validate_structure(c.amalgam).empty());
  EXPECT_THROW(joint_embed(one, p), std::invalid_argument);
}

}  // namespace
}  // namespace treeforge
