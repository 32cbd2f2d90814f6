// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <string>
#include <vector>

#include "treeforge/structure.hpp"

namespace treeforge {

// Each entry names one violated invariant; empty means valid.
std::vector<std::string> validate_structure(const MixedStructure& s);

int meet(const MixedStructure& s, int a, int b);

// Pairwise meets of X together with X.
NodeSet meet_closure(const MixedStructure& s, const NodeSet& x);
// Substructure generated by X in the flavor language.
NodeSet closure(const MixedStructure& s, const NodeSet& x);
bool is_closed(const MixedStructure& s, const NodeSet& x);

int semibranch_projection(const MixedStructure& s, int a);

// Child subtrees of g, each sorted, ordered by smallest member.
std::vector<NodeSet> cones_at(const MixedStructure& s, int g);
// Index into cones_at(s, g) of the cone holding x, or kNone when x is not
// strictly above g.
int cone_index(const MixedStructure& s, int g, int x);

struct SemibranchSpace {
  std::vector<NodeSet> semibranches;  // downward-closed chains, preorder
  std::vector<int> index_of_node;     // gamma -> index of T_{<= gamma}
  bool bijective = false;
};
SemibranchSpace semibranch_space(const MixedStructure& s);

// Canonical invariant of a tuple. Terms are pairwise meets of the augmented
// tuple (the tuple followed by the point, or by the largest projection in the
// semibranched flavor); each term is named by the smallest index pair (i, j)
// with i <= j that evaluates to it.
struct QfTypeCode {
  Flavor flavor = Flavor::kPlain;
  int arity = 0;
  int augmented = 0;
  std::vector<std::array<int, 3>> meet_rel;  // a_i ^ a_j <= a_k, i <= j
  std::vector<std::array<int, 4>> edge_rel;  // edge between terms (i,j),(k,l)
  std::vector<std::array<int, 2>> eq_rel;    // a_i == a_j, i < j

  auto operator<=>(const QfTypeCode&) const = default;
  bool operator==(const QfTypeCode&) const = default;
  std::string to_string() const;
};

QfTypeCode qf_type(const MixedStructure& s, const std::vector<int>& tuple);

struct EmbeddingCheck {
  bool ok = true;
  std::string atom;          // "meet", "order", "edge", "point", ...
  std::vector<int> witness;  // source ids exhibiting the failure
};

// map[i] is the image of source node i. Throws std::invalid_argument when the
// map is not injective or leaves the target.
EmbeddingCheck is_embedding(const MixedStructure& source,
                            const MixedStructure& target,
                            const std::vector<int>& map);

struct Substructure {
  MixedStructure structure;
  std::vector<int> ids;  // local index -> id in the parent structure
};
// X must be closed; throws std::invalid_argument otherwise.
Substructure induced_substructure(const MixedStructure& s, const NodeSet& x);

}  // namespace treeforge
