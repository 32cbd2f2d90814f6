// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "treeforge/core.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "oracles.hpp"
#include "treeforge/enumerate.hpp"

namespace treeforge {
namespace {

MixedStructure plain(std::vector<int> parent) {
  return MixedStructure(Flavor::kPlain, std::move(parent));
}

MixedStructure with_tip(const std::vector<int>& parent, int tip) {
  return MixedStructure(Flavor::kSemibranched, parent, {}, kNone, tip);
}

std::vector<NodeSet> subsets_upto(int n, int k) {
  std::vector<NodeSet> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    if (__builtin_popcount(mask) > k) continue;
    NodeSet x;
    for (int v = 0; v < n; ++v) {
      if (mask >> v & 1) x.push_back(v);
    }
    out.push_back(x);
  }
  return out;
}

NodeSet to_nodeset(const std::set<int>& s) { return NodeSet(s.begin(), s.end()); }

TEST(Validate, SingleNodeIsValid) {
  EXPECT_TRUE(validate_structure(plain({kNone})).empty());
}

TEST(Validate, TwoCycleIsReported) {
  auto r = validate_structure(plain({kNone, 2, 1}));
  EXPECT_NE(std::find(r.begin(), r.end(), "acyclicity"), r.end());
}

TEST(Validate, TipOnPlainIsFlavorMismatch) {
  MixedStructure s(Flavor::kPlain, {kNone, 0}, {}, kNone, 1);
  auto r = validate_structure(s);
  EXPECT_NE(std::find(r.begin(), r.end(), "flavor mismatch"), r.end());
}

TEST(Validate, EdgeDefectsAreNamed) {
  MixedStructure loops(Flavor::kPlain, {kNone, 0}, {{1, 1}});
  auto r = validate_structure(loops);
  EXPECT_NE(std::find(r.begin(), r.end(), "self-loop"), r.end());
  MixedStructure dup(Flavor::kPlain, {kNone, 0}, {{0, 1}, {1, 0}});
  r = validate_structure(dup);
  EXPECT_NE(std::find(r.begin(), r.end(), "duplicate edge"), r.end());
  MixedStructure two_roots(Flavor::kPlain, {kNone, kNone});
  r = validate_structure(two_roots);
  EXPECT_NE(std::find(r.begin(), r.end(), "root count"), r.end());
}

TEST(Validate, PointedNeedsPoint) {
  MixedStructure s(Flavor::kPointed, {kNone, 0});
  auto r = validate_structure(s);
  EXPECT_NE(std::find(r.begin(), r.end(), "flavor mismatch"), r.end());
  s.set_point(1);
  EXPECT_TRUE(validate_structure(s).empty());
}

TEST(Meet, Examples) {
  auto path = plain({kNone, 0, 1});
  EXPECT_EQ(meet(path, 2, 2), 2);
  EXPECT_EQ(meet(path, 1, 2), 1);
  auto star = plain({kNone, 0, 0});
  EXPECT_EQ(meet(star, 1, 2), 0);
  EXPECT_THROW(meet(star, 0, 3), std::out_of_range);
}

TEST(Meet, MatchesOracleAndLawsUpToSeven) {
  for (int n = 1; n <= 7; ++n) {
    for (const auto& parent : rooted_trees(n)) {
      auto s = plain(parent);
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          const int m = s.meet(a, b);
          ASSERT_EQ(m, oracle::lca(s, a, b));
          ASSERT_EQ(m, s.meet(b, a));
          for (int c = 0; c < n; ++c) {
            ASSERT_EQ(s.meet(m, c), s.meet(a, s.meet(b, c)));
          }
        }
        ASSERT_EQ(s.meet(a, a), a);
      }
    }
  }
}

TEST(Closure, Examples) {
  auto star = plain({kNone, 0, 0});
  EXPECT_EQ(closure(star, {1}), (NodeSet{1}));
  EXPECT_EQ(closure(star, {1, 2}), (NodeSet{0, 1, 2}));
  MixedStructure pointed(Flavor::kPointed, {kNone, 0, 0}, {}, 1);
  EXPECT_EQ(closure(pointed, {}), (NodeSet{1}));
  EXPECT_EQ(closure(pointed, {2}), (NodeSet{0, 1, 2}));
  auto semi = with_tip({kNone, 0, 0}, 1);
  EXPECT_TRUE(closure(semi, {}).empty());
  EXPECT_EQ(closure(semi, {2}), (NodeSet{0, 2}));
}

TEST(Closure, AgreesWithFixpointOracleAndIsClosureOperator) {
  for (int n = 1; n <= 6; ++n) {
    auto sets = subsets_upto(n, 4);
    for (const auto& parent : rooted_trees(n)) {
      std::vector<MixedStructure> variants{plain(parent)};
      for (int t = 0; t < n; ++t) {
        variants.push_back(with_tip(parent, t));
        variants.push_back(
            MixedStructure(Flavor::kPointed, parent, {}, t));
      }
      for (const auto& s : variants) {
        for (const auto& x : sets) {
          NodeSet cx = closure(s, x);
          if (!(s.flavor() == Flavor::kSemibranched && x.empty())) {
            ASSERT_EQ(cx, to_nodeset(oracle::closure(s, std::set<int>(x.begin(), x.end()))));
          }
          ASSERT_TRUE(set_subset(x, cx));
          ASSERT_EQ(closure(s, cx), cx);
          for (int v = 0; v < n; ++v) {
            if (set_contains(x, v)) continue;
            NodeSet bigger = set_union(x, {v});
            ASSERT_TRUE(set_subset(cx, closure(s, bigger)));
          }
        }
      }
    }
  }
}

TEST(Closure, SizeBoundsUpToSix) {
  for (int n = 1; n <= 6; ++n) {
    auto sets = subsets_upto(n, n);
    for (const auto& parent : rooted_trees(n)) {
      auto s = plain(parent);
      for (const auto& x : sets) {
        if (x.empty()) continue;
        ASSERT_LE(closure(s, x).size(), 2 * x.size() - 1);
        for (int t = 0; t < n; ++t) {
          ASSERT_LE(closure(with_tip(parent, t), x).size(), 2 * x.size() + 1);
        }
      }
    }
  }
}

TEST(Projection, Examples) {
  auto s = with_tip({kNone, 0, 1, 0}, 2);
  EXPECT_EQ(semibranch_projection(s, 1), 1);
  EXPECT_EQ(semibranch_projection(s, 2), 2);
  auto sib = with_tip({kNone, 0, 0}, 1);
  EXPECT_EQ(semibranch_projection(sib, 2), 0);
  EXPECT_THROW(semibranch_projection(plain({kNone}), 0), std::invalid_argument);
}

TEST(Projection, MonotoneAndEqualsMeetWithTip) {
  for (int n = 1; n <= 6; ++n) {
    for (const auto& parent : rooted_trees(n)) {
      for (int t = 0; t < n; ++t) {
        auto s = with_tip(parent, t);
        for (int a = 0; a < n; ++a) {
          ASSERT_EQ(semibranch_projection(s, a), oracle::tip_projection(s, a));
          for (int b = 0; b < n; ++b) {
            if (oracle::below(s, a, b)) {
              ASSERT_TRUE(oracle::below(s, semibranch_projection(s, a),
                                        semibranch_projection(s, b)));
            }
          }
        }
      }
    }
  }
}

TEST(Cones, Examples) {
  auto star3 = plain({kNone, 0, 0, 0});
  EXPECT_TRUE(cones_at(star3, 1).empty());
  EXPECT_EQ(cones_at(star3, 0), (std::vector<NodeSet>{{1}, {2}, {3}}));
  // root 0, a = 1, b = 2 above a, c = 3
  auto cat = plain({kNone, 0, 1, 0});
  EXPECT_EQ(cones_at(cat, 0), (std::vector<NodeSet>{{1, 2}, {3}}));
  EXPECT_EQ(cone_index(cat, 0, 2), 0);
  EXPECT_EQ(cone_index(cat, 1, 3), kNone);
}

TEST(Cones, AreMeetEquivalenceClasses) {
  for (int n = 1; n <= 6; ++n) {
    for (const auto& parent : rooted_trees(n)) {
      auto s = plain(parent);
      for (int g = 0; g < n; ++g) {
        auto cones = cones_at(s, g);
        std::map<int, int> block;
        for (size_t i = 0; i < cones.size(); ++i) {
          for (int x : cones[i]) block[x] = static_cast<int>(i);
        }
        for (int x = 0; x < n; ++x) {
          const bool above = x != g && oracle::below(s, g, x);
          ASSERT_EQ(block.count(x) > 0, above);
          if (!above) continue;
          for (int y = 0; y < n; ++y) {
            if (!block.count(y)) continue;
            const int m = oracle::lca(s, x, y);
            const bool related = m != g && oracle::below(s, g, m);
            ASSERT_EQ(block[x] == block[y], related);
          }
        }
      }
    }
  }
}

TEST(SemibranchSpace, Examples) {
  auto one = semibranch_space(plain({kNone}));
  EXPECT_EQ(one.semibranches, (std::vector<NodeSet>{{0}}));
  auto path = semibranch_space(plain({kNone, 0, 1}));
  EXPECT_EQ(path.semibranches.size(), 3u);
  EXPECT_TRUE(path.bijective);
  for (int k = 1; k <= 5; ++k) {
    std::vector<int> parent(k + 1, 0);
    parent[0] = kNone;
    EXPECT_EQ(semibranch_space(plain(parent)).semibranches.size(),
              static_cast<size_t>(k + 1));
  }
}

TEST(SemibranchSpace, MatchesSubsetEnumeration) {
  for (int n = 1; n <= 6; ++n) {
    for (const auto& parent : rooted_trees(n)) {
      auto s = plain(parent);
      std::set<NodeSet> expected;
      for (int mask = 1; mask < (1 << n); ++mask) {
        NodeSet x;
        for (int v = 0; v < n; ++v) {
          if (mask >> v & 1) x.push_back(v);
        }
        bool ok = true;
        for (int a : x) {
          for (int b : x) ok = ok && (oracle::below(s, a, b) || oracle::below(s, b, a));
          for (int c : oracle::ancestors(s, a)) ok = ok && set_contains(x, c);
        }
        if (ok) expected.insert(x);
      }
      auto space = semibranch_space(s);
      std::set<NodeSet> got(space.semibranches.begin(), space.semibranches.end());
      ASSERT_EQ(got, expected);
      ASSERT_TRUE(space.bijective);
      for (int v = 0; v < n; ++v) {
        ASSERT_EQ(space.semibranches[space.index_of_node[v]],
                  to_nodeset(oracle::ancestors(s, v)));
      }
    }
  }
}

TEST(QfType, Examples) {
  auto chain = plain({kNone, 0});
  EXPECT_EQ(qf_type(chain, {0, 1}), qf_type(chain, {0, 1}));
  EXPECT_NE(qf_type(chain, {0, 1}), qf_type(chain, {1, 0}));
  auto star = plain({kNone, 0, 0});
  EXPECT_EQ(qf_type(star, {1, 2}), qf_type(star, {2, 1}));
  MixedStructure edged(Flavor::kPlain, {kNone, 0, 0}, {{1, 2}});
  EXPECT_EQ(qf_type(edged, {1, 2}), qf_type(edged, {2, 1}));
  MixedStructure one_edge(Flavor::kPointed, {kNone, 0, 0}, {{0, 1}}, 0);
  EXPECT_NE(qf_type(one_edge, {1}), qf_type(one_edge, {2}));
}

// Within each structure, the partition of tuples by code must equal the
// partition by brute-force labeled canonical form of the generated
// substructure.
void check_partition(const MixedStructure& s, int max_len) {
  std::vector<std::vector<int>> tuples{{}};
  std::vector<std::vector<int>> frontier{{}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto& t : frontier) {
      for (int v = 0; v < s.size(); ++v) {
        auto u = t;
        u.push_back(v);
        next.push_back(u);
      }
    }
    tuples.insert(tuples.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  std::map<QfTypeCode, std::string> code_to_form;
  std::map<std::string, QfTypeCode> form_to_code;
  for (const auto& t : tuples) {
    auto code = qf_type(s, t);
    auto form = std::to_string(t.size()) + ":" + oracle::labeled_canonical_form(s, t);
    auto [it, fresh] = code_to_form.try_emplace(code, form);
    ASSERT_EQ(it->second, form) << code.to_string();
    auto [jt, fresh2] = form_to_code.try_emplace(form, code);
    ASSERT_EQ(jt->second, code) << form;
  }
}

TEST(QfType, AgreesWithBruteForceIsomorphism) {
  for (int n = 1; n <= 5; ++n) {
    for (Flavor f : {Flavor::kPlain, Flavor::kPointed, Flavor::kSemibranched}) {
      const bool edges = n <= 4 || f == Flavor::kPlain;
      for_each_structure(f, n, edges, [&](const MixedStructure& s) {
        check_partition(s, 3);
      });
    }
  }
}

TEST(QfType, AgreesAcrossStructures) {
  // Codes are also comparable between different structures of one flavor.
  for (Flavor f : {Flavor::kPlain, Flavor::kPointed, Flavor::kSemibranched}) {
    std::map<QfTypeCode, std::string> code_to_form;
    std::map<std::string, QfTypeCode> form_to_code;
    for (const auto& s : enumerate_structures_upto(f, 4, true)) {
      for (int a = 0; a < s.size(); ++a) {
        for (int b = 0; b < s.size(); ++b) {
          std::vector<int> t{a, b};
          auto code = qf_type(s, t);
          auto form = oracle::labeled_canonical_form(s, t);
          auto [it, x] = code_to_form.try_emplace(code, form);
          ASSERT_EQ(it->second, form);
          auto [jt, y] = form_to_code.try_emplace(form, code);
          ASSERT_EQ(jt->second, code);
        }
      }
    }
  }
}

TEST(Embedding, Examples) {
  auto star = plain({kNone, 0, 0});
  EXPECT_TRUE(is_embedding(star, star, {0, 1, 2}).ok);
  auto chain = plain({kNone, 0, 1});
  auto collapse = is_embedding(star, chain, {0, 1, 2});
  EXPECT_FALSE(collapse.ok);
  EXPECT_EQ(collapse.atom, "meet");
  MixedStructure e(Flavor::kPlain, {kNone, 0}, {{0, 1}});
  MixedStructure ne(Flavor::kPlain, {kNone, 0}, {}, kNone, kNone, true);
  auto dropped = is_embedding(e, ne, {0, 1});
  EXPECT_FALSE(dropped.ok);
  EXPECT_EQ(dropped.atom, "edge");
  EXPECT_THROW(is_embedding(star, star, {0, 1, 1}), std::invalid_argument);
  EXPECT_THROW(is_embedding(star, star, {0, 1, 3}), std::invalid_argument);
}

TEST(Embedding, PointAndProjectionAtoms) {
  MixedStructure a(Flavor::kPointed, {kNone, 0}, {}, 1);
  MixedStructure b(Flavor::kPointed, {kNone, 0}, {}, 0);
  EXPECT_EQ(is_embedding(a, b, {0, 1}).atom, "point");
  auto s = with_tip({kNone, 0}, 1);
  auto t = with_tip({kNone, 0}, 0);
  EXPECT_EQ(is_embedding(s, t, {0, 1}).atom, "semibranch");
  EXPECT_EQ(is_embedding(a, s, {0, 1}).atom, "flavor");
}

TEST(Embedding, AutomorphismsAreEmbeddings) {
  for (const auto& s : enumerate_structures_upto(Flavor::kPointed, 4, true)) {
    for (const auto& perm : structure_automorphisms(s)) {
      ASSERT_TRUE(is_embedding(s, s, perm).ok);
    }
  }
}

TEST(Substructure, InducedKeepsRelations) {
  // 0 - 1 - 2 chain with leaf 3 on 1; edge 2-3.
  MixedStructure s(Flavor::kSemibranched, {kNone, 0, 1, 1}, {{2, 3}}, kNone, 2);
  NodeSet x = closure(s, {3});
  EXPECT_EQ(x, (NodeSet{1, 3}));
  auto sub = induced_substructure(s, x);
  EXPECT_TRUE(validate_structure(sub.structure).empty());
  EXPECT_TRUE(is_embedding(sub.structure, s, sub.ids).ok);
  EXPECT_THROW(induced_substructure(s, {2, 3}), std::invalid_argument);
}

}  // namespace
}  // namespace treeforge
