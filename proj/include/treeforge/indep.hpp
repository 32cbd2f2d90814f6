// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "treeforge/core.hpp"
#include "treeforge/limit.hpp"
#include "treeforge/structure.hpp"

namespace treeforge {

enum class RelationKind { kCone, kSemibranch, kGraphFree, kMixedCone, kMixedSemibranch };
std::string_view relation_name(RelationKind k);
// "cone", "semibranch", "graph", "mixed-cone", "mixed-semibranch".
RelationKind parse_relation(std::string_view name);

struct Relation {
  RelationKind kind = RelationKind::kCone;
  int gamma = kNone;  // cone relations only
};

enum class IndepClause {
  kNone,
  kBetweenness,        // (i): b <= a with nothing of the base in between
  kSeparation,         // (ii): a ^ b outside the base, not separated
  kGraphIntersection,  // common vertex outside the base
  kGraphCrossEdge,     // edge between A \ C and B \ C
};
std::string_view clause_name(IndepClause c);

enum class IndepSide { kNone, kTree, kGraph };
std::string_view side_name(IndepSide s);

struct IndepVerdict {
  bool independent = true;
  IndepClause clause = IndepClause::kNone;
  IndepSide side = IndepSide::kNone;
  std::vector<int> witness;  // (a, b) or (a, b, a^b); smallest ids first
};

// <X>_gamma: pairwise meets of X together with gamma.
NodeSet cone_closure(const MixedStructure& s, int gamma, const NodeSet& x);

// A cone-independent from B over C at gamma. Throws std::invalid_argument
// when gamma is out of range.
IndepVerdict cone_indep(const MixedStructure& s, int gamma, const NodeSet& a,
                        const NodeSet& b, const NodeSet& c);

// Semibranch independence for the semibranch of s (its tip chain). Throws
// std::invalid_argument unless s is Semibranched.
IndepVerdict semibranch_indep(const MixedStructure& s, const NodeSet& a,
                              const NodeSet& b, const NodeSet& c);

// A ∩ B ⊆ C and no edge between A \ C and B \ C, on the raw sets.
IndepVerdict graph_free_indep(const MixedStructure& s, const NodeSet& a,
                              const NodeSet& b, const NodeSet& c);

// Tree relation on the tree-side closures and graph freeness on the same
// closures. `rel` must be kMixedCone or kMixedSemibranch.
IndepVerdict mix_indep(const MixedStructure& s, const Relation& rel,
                       const NodeSet& a, const NodeSet& b, const NodeSet& c);

// Dispatch on rel.kind.
IndepVerdict independent(const MixedStructure& s, const Relation& rel,
                         const NodeSet& a, const NodeSet& b, const NodeSet& c);

// Extends p[i] -> q[i] to the closures of p and q following meets, the point
// and projections. No check that the result is a partial isomorphism.
std::map<int, int> match_generated(const MixedStructure& from,
                                   const std::vector<int>& p,
                                   const MixedStructure& to,
                                   const std::vector<int>& q);

// Closures the relation works on: <AC>, <BC>, <C>.
NodeSet relation_closure(const MixedStructure& s, const Relation& rel,
                         const NodeSet& x);

// Re-evaluates the violated clause on the witness alone.
bool replay_violation(const MixedStructure& s, const Relation& rel,
                      const NodeSet& a, const NodeSet& b, const NodeSet& c,
                      const IndepVerdict& v);

// Hypothesis of the easy sufficient condition: for all a in A and b in B,
// a >= gamma implies a ^ b <= gamma, and a ^ gamma < gamma implies
// a ^ gamma < b ^ gamma.
bool easy_indep_sufficient(const MixedStructure& s, int gamma, const NodeSet& a,
                           const NodeSet& b);

// Which case of the one-point extension construction applied.
enum class ExtensionCase { kInBase, kBelowAll, kAboveAll, kBetween, kSearch };
std::string_view extension_case_name(ExtensionCase c);

struct ExtensionWitness {
  int node = kNone;
  ExtensionCase which = ExtensionCase::kInBase;
};

// One-point step: <a C> = <C> ∪ {a}, C ⊆ B. Returns a' with the type of a
// over C and a' independent from B over C, growing the approximation when
// needed. Cone relations follow the three-case construction; semibranch
// relations search the one-point extensions over <BC>. Throws
// std::invalid_argument when the preconditions fail.
ExtensionWitness extension_witness(Approximation& appr, int a, const NodeSet& c,
                                   const NodeSet& b, const Relation& rel);

// Tuple version: each new element of <aC> is handled as a one-point step,
// branch points first. Returns the images of the tuple entries.
std::vector<int> extension_witness_tuple(Approximation& appr,
                                         const std::vector<int>& a,
                                         const NodeSet& c, const NodeSet& b,
                                         const Relation& rel);

// A tuple inside a structure; the first `base_len` entries enumerate C.
struct TypedTuple {
  MixedStructure structure;
  std::vector<int> tuple;
};

// Joint type of (C, a, b) forced by independence: <aC> and <bC> are glued
// over <C> with new points of the left side below those of the right side
// inside each gap and no cross edges. Both inputs must agree on their C
// prefix. For Plain structures the base prefix must be nonempty. Throws
// std::invalid_argument on inconsistent input.
QfTypeCode predict_joint_type(const TypedTuple& left, const TypedTuple& right,
                              int base_len, const Relation& rel);

}  // namespace treeforge
