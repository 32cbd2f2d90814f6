// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "treeforge/enumerate.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <set>

#include "oracles.hpp"
#include "treeforge/core.hpp"

namespace treeforge {
namespace {

// Brute force: every parent array with parent[i] < i, deduplicated by
// canonical form over all relabelings.
std::set<std::string> brute_classes(Flavor f, int n, bool with_edges) {
  std::set<std::string> out;
  std::vector<int> parent(n, 0);
  parent[0] = kNone;
  const int pairs = n * (n - 1) / 2;
  while (true) {
    for (int p = 0; p < (f == Flavor::kPlain ? 1 : n); ++p) {
      for (int mask = 0; mask < (with_edges ? 1 << pairs : 1); ++mask) {
        std::vector<Edge> edges;
        int bit = 0;
        for (int i = 0; i < n; ++i) {
          for (int j = i + 1; j < n; ++j, ++bit) {
            if (mask >> bit & 1) edges.emplace_back(i, j);
          }
        }
        MixedStructure s(f, parent, edges, f == Flavor::kPointed ? p : kNone,
                         f == Flavor::kSemibranched ? p : kNone, with_edges);
        out.insert(oracle::structure_canonical_form(s));
      }
    }
    int i = n - 1;
    while (i >= 1 && parent[i] + 1 >= i) parent[i--] = 0;
    if (i < 1) break;
    ++parent[i];
  }
  return out;
}

TEST(RootedTrees, KnownCounts) {
  // OEIS A000081.
  const int expected[] = {0, 1, 1, 2, 4, 9, 20, 48};
  for (int n = 1; n <= 7; ++n) {
    EXPECT_EQ(rooted_trees(n).size(), static_cast<size_t>(expected[n])) << n;
  }
}

TEST(Enumerate, Examples) {
  EXPECT_EQ(enumerate_structures(Flavor::kPlain, 1, false).size(), 1u);
  EXPECT_EQ(enumerate_structures(Flavor::kPlain, 3, false).size(), 2u);
  EXPECT_EQ(enumerate_structures(Flavor::kPointed, 2, true).size(), 4u);
  EXPECT_EQ(enumerate_structures(Flavor::kPointed, 2, false).size(), 2u);
}

TEST(Enumerate, OneRepresentativePerClass) {
  for (Flavor f : {Flavor::kPlain, Flavor::kPointed, Flavor::kSemibranched}) {
    for (int n = 1; n <= 4; ++n) {
      for (bool edges : {false, true}) {
        auto got = enumerate_structures(f, n, edges);
        std::set<std::string> forms;
        for (const auto& s : got) {
          ASSERT_TRUE(validate_structure(s).empty());
          forms.insert(oracle::structure_canonical_form(s));
        }
        EXPECT_EQ(forms.size(), got.size()) << "duplicates at n=" << n;
        EXPECT_EQ(forms, brute_classes(f, n, edges)) << "n=" << n;
      }
    }
  }
}

TEST(Enumerate, Deterministic) {
  auto a = enumerate_structures(Flavor::kSemibranched, 4, true);
  auto b = enumerate_structures(Flavor::kSemibranched, 4, true);
  EXPECT_EQ(a, b);
}

TEST(Enumerate, BudgetRefusalCarriesEstimate) {
  try {
    enumerate_structures(Flavor::kPlain, 9, true);
    FAIL() << "expected a budget refusal";
  } catch (const BudgetExceeded& e) {
    EXPECT_GT(e.estimate(), enumeration_budget());
  }
}

TEST(Automorphisms, CountMatchesBruteForce) {
  for (int n = 1; n <= 6; ++n) {
    for (const auto& parent : rooted_trees(n)) {
      MixedStructure s(Flavor::kPlain, parent);
      std::vector<int> perm(n);
      for (int i = 0; i < n; ++i) perm[i] = i;
      size_t count = 0;
      do {
        bool ok = true;
        for (int v = 0; v < n && ok; ++v) {
          int p = parent[v];
          ok = (p == kNone) ? parent[perm[v]] == kNone
                            : parent[perm[v]] == perm[p];
        }
        count += ok;
      } while (std::next_permutation(perm.begin(), perm.end()));
      EXPECT_EQ(tree_automorphisms(parent).size(), count);
    }
  }
}

}  // namespace
}  // namespace treeforge
