// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace treeforge {

inline constexpr int kNone = -1;

enum class Flavor { kPlain, kPointed, kSemibranched };

std::string_view flavor_name(Flavor f);
// Accepts "plain", "pointed", "semibranched"; throws std::invalid_argument.
Flavor parse_flavor(std::string_view name);

// Sorted, duplicate-free list of node ids.
using NodeSet = std::vector<int>;
using Edge = std::pair<int, int>;

NodeSet make_set(std::vector<int> ids);
NodeSet set_union(const NodeSet& a, const NodeSet& b);
NodeSet set_intersection(const NodeSet& a, const NodeSet& b);
NodeSet set_difference(const NodeSet& a, const NodeSet& b);
bool set_contains(const NodeSet& s, int x);
bool set_subset(const NodeSet& a, const NodeSet& b);

// A finite meet-tree (rooted tree, meet = lowest common ancestor) with an
// optional symmetric irreflexive edge layer and an optional distinguished
// point or semibranch tip.
//
// Raw data is stored as given so that malformed input can be reported by
// validate_structure(); derived accessors throw std::logic_error when the
// parent array is not a rooted tree.
class MixedStructure {
 public:
  MixedStructure() = default;
  MixedStructure(Flavor flavor, std::vector<int> parent,
                 std::vector<Edge> edges = {}, int point = kNone,
                 int tip = kNone, bool relational = false,
                 bool treat_tip_as_branch = false);

  // One node; it is the point (Pointed) or the tip (Semibranched).
  static MixedStructure singleton(Flavor flavor, bool relational);

  Flavor flavor() const { return flavor_; }
  bool relational() const { return relational_; }
  int size() const { return static_cast<int>(parent_.size()); }
  const std::vector<int>& parents() const { return parent_; }
  int parent(int v) const;
  int point() const { return point_; }
  int tip() const { return tip_; }
  bool treat_tip_as_branch() const { return treat_tip_as_branch_; }
  const std::vector<Edge>& raw_edges() const { return raw_edges_; }

  void set_flavor(Flavor f) { flavor_ = f; }
  void set_relational(bool on) { relational_ = on; }
  void set_point(int p) { point_ = p; }
  void set_tip(int t) { tip_ = t; }
  void set_treat_tip_as_branch(bool on) { treat_tip_as_branch_ = on; }

  bool well_formed() const { return well_formed_; }

  int root() const;
  int depth(int v) const;
  const std::vector<int>& children(int v) const;
  // a <= b in the tree order (a is an ancestor of b or equal).
  bool leq(int a, int b) const;
  bool lt(int a, int b) const { return a != b && leq(a, b); }
  bool comparable(int a, int b) const { return leq(a, b) || leq(b, a); }
  int meet(int a, int b) const;

  bool has_edge(int a, int b) const;
  const std::vector<int>& neighbors(int v) const;
  // Normalized (i < j), sorted, duplicate-free.
  std::vector<Edge> edges() const;

  // Semibranch Gamma = ancestors of the tip (inclusive).
  bool in_branch(int a) const;
  // Gamma minus the tip, unless the tip stands in for a full branch.
  bool in_branch_interior(int a) const;
  // max{b in Gamma : b <= a}.
  int project(int a) const;

  // Growth; existing ids keep their relations.
  int add_leaf(int parent);
  // New node placed between `child` and its parent (new root if none).
  int insert_above(int child);
  void add_edge(int a, int b);

  bool operator==(const MixedStructure& o) const;

 private:
  void rebuild();
  void require_tree() const;
  void check_id(int v) const;

  Flavor flavor_ = Flavor::kPlain;
  bool relational_ = false;
  std::vector<int> parent_;
  std::vector<Edge> raw_edges_;
  int point_ = kNone;
  int tip_ = kNone;
  bool treat_tip_as_branch_ = false;

  bool well_formed_ = true;
  int root_ = kNone;
  std::vector<int> depth_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> adj_;
};

}  // namespace treeforge
