// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "treeforge/structure.hpp"

namespace treeforge {

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, std::uint64_t estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  std::uint64_t estimate() const { return estimate_; }

 private:
  std::uint64_t estimate_;
};

// Candidate budget for enumeration; TREEFORGE_BUDGET overrides the default.
std::uint64_t enumeration_budget();

// Rooted unlabeled trees with exactly n nodes as canonical parent arrays
// (parent[i] < i, preorder with children sorted by subtree code).
std::vector<std::vector<int>> rooted_trees(int n);

// Automorphisms of a rooted tree, each as a permutation of node ids.
std::vector<std::vector<int>> tree_automorphisms(const std::vector<int>& parent);

// One representative per isomorphism class of structures with exactly n
// nodes in the given flavor (point or tip placed on every node; every edge
// set when with_edges is on). Deterministic order. Throws BudgetExceeded when
// the candidate count exceeds enumeration_budget().
void for_each_structure(Flavor flavor, int n, bool with_edges,
                        const std::function<void(const MixedStructure&)>& fn);
std::vector<MixedStructure> enumerate_structures(Flavor flavor, int n,
                                                 bool with_edges);
// All sizes 1..max_n concatenated.
std::vector<MixedStructure> enumerate_structures_upto(Flavor flavor, int max_n,
                                                      bool with_edges);

// Automorphisms of a full structure (tree, point/tip and edges).
std::vector<std::vector<int>> structure_automorphisms(const MixedStructure& s);

// Every embedding of `source` into `target` (same flavor), by backtracking
// over injective maps; deterministic lexicographic order.
std::vector<std::vector<int>> embeddings_between(const MixedStructure& source,
                                                 const MixedStructure& target);

}  // namespace treeforge
