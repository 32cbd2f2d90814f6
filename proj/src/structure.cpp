// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "treeforge/structure.hpp"

#include <algorithm>
#include <stdexcept>

#include "treeforge/mutation.hpp"

namespace treeforge {

std::string_view flavor_name(Flavor f) {
  switch (f) {
    case Flavor::kPlain: return "plain";
    case Flavor::kPointed: return "pointed";
    case Flavor::kSemibranched: return "semibranched";
  }
  return "plain";
}

Flavor parse_flavor(std::string_view name) {
  if (name == "plain") return Flavor::kPlain;
  if (name == "pointed") return Flavor::kPointed;
  if (name == "semibranched") return Flavor::kSemibranched;
  throw std::invalid_argument("unknown flavor: " + std::string(name));
}

NodeSet make_set(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

NodeSet set_intersection(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

NodeSet set_difference(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

bool set_contains(const NodeSet& s, int x) {
  return std::binary_search(s.begin(), s.end(), x);
}

bool set_subset(const NodeSet& a, const NodeSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

MixedStructure::MixedStructure(Flavor flavor, std::vector<int> parent,
                               std::vector<Edge> edges, int point, int tip,
                               bool relational, bool treat_tip_as_branch)
    : flavor_(flavor),
      relational_(relational || !edges.empty()),
      parent_(std::move(parent)),
      raw_edges_(std::move(edges)),
      point_(point),
      tip_(tip),
      treat_tip_as_branch_(treat_tip_as_branch) {
  rebuild();
}

MixedStructure MixedStructure::singleton(Flavor flavor, bool relational) {
  return MixedStructure(flavor, {kNone}, {},
                        flavor == Flavor::kPointed ? 0 : kNone,
                        flavor == Flavor::kSemibranched ? 0 : kNone,
                        relational);
}

void MixedStructure::rebuild() {
  const int n = size();
  well_formed_ = true;
  root_ = kNone;
  for (int v = 0; v < n && well_formed_; ++v) {
    int p = parent_[v];
    if (p == kNone) {
      if (root_ != kNone) well_formed_ = false;
      root_ = v;
    } else if (p < 0 || p >= n || p == v) {
      well_formed_ = false;
    }
  }
  if (n > 0 && root_ == kNone) well_formed_ = false;
  depth_.assign(n, -1);
  children_.assign(n, {});
  adj_.assign(n, {});
  if (well_formed_) {
    // Every node must reach the root within n steps.
    for (int v = 0; v < n && well_formed_; ++v) {
      int steps = 0;
      int x = v;
      while (x != kNone && depth_[x] < 0 && steps <= n) {
        x = parent_[x];
        ++steps;
      }
      if (steps > n) {
        well_formed_ = false;
        break;
      }
      int base = x == kNone ? -1 : depth_[x];
      // Second pass assigns depths along the walked path.
      std::vector<int> path;
      for (int y = v; y != x; y = parent_[y]) path.push_back(y);
      for (auto it = path.rbegin(); it != path.rend(); ++it) {
        depth_[*it] = ++base;
      }
    }
  }
  if (well_formed_) {
    for (int v = 0; v < n; ++v) {
      if (parent_[v] != kNone) children_[parent_[v]].push_back(v);
    }
  }
  for (const auto& [a, b] : raw_edges_) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) continue;
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  }
  for (auto& nb : adj_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
}

void MixedStructure::require_tree() const {
  if (!well_formed_) throw std::logic_error("parent array is not a rooted tree");
}

void MixedStructure::check_id(int v) const {
  if (v < 0 || v >= size()) {
    throw std::out_of_range("node id out of range: " + std::to_string(v));
  }
}

int MixedStructure::parent(int v) const {
  check_id(v);
  return parent_[v];
}

int MixedStructure::root() const {
  require_tree();
  return root_;
}

int MixedStructure::depth(int v) const {
  require_tree();
  check_id(v);
  return depth_[v];
}

const std::vector<int>& MixedStructure::children(int v) const {
  require_tree();
  check_id(v);
  return children_[v];
}

bool MixedStructure::leq(int a, int b) const {
  require_tree();
  check_id(a);
  check_id(b);
  while (depth_[b] > depth_[a]) b = parent_[b];
  return a == b;
}

int MixedStructure::meet(int a, int b) const {
  require_tree();
  check_id(a);
  check_id(b);
  int x = a;
  int y = b;
  while (depth_[x] > depth_[y]) x = parent_[x];
  while (depth_[y] > depth_[x]) y = parent_[y];
  while (x != y) {
    x = parent_[x];
    y = parent_[y];
  }
  if (active_mutant() == Mutant::kBrokenLca && x != a && x != b &&
      parent_[x] != kNone) {
    return parent_[x];
  }
  return x;
}

bool MixedStructure::has_edge(int a, int b) const {
  check_id(a);
  check_id(b);
  return std::binary_search(adj_[a].begin(), adj_[a].end(), b);
}

const std::vector<int>& MixedStructure::neighbors(int v) const {
  check_id(v);
  return adj_[v];
}

std::vector<Edge> MixedStructure::edges() const {
  std::vector<Edge> out;
  for (int a = 0; a < size(); ++a) {
    for (int b : adj_[a]) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

bool MixedStructure::in_branch(int a) const {
  if (flavor_ != Flavor::kSemibranched) {
    throw std::logic_error("semibranch query on a non-semibranched structure");
  }
  return leq(a, tip_);
}

bool MixedStructure::in_branch_interior(int a) const {
  return in_branch(a) && (a != tip_ || treat_tip_as_branch_);
}

int MixedStructure::project(int a) const {
  if (flavor_ != Flavor::kSemibranched) {
    throw std::logic_error("projection on a non-semibranched structure");
  }
  return meet(a, tip_);
}

int MixedStructure::add_leaf(int parent) {
  require_tree();
  check_id(parent);
  const int v = size();
  parent_.push_back(parent);
  depth_.push_back(depth_[parent] + 1);
  children_.emplace_back();
  children_[parent].push_back(v);
  adj_.emplace_back();
  return v;
}

int MixedStructure::insert_above(int child) {
  require_tree();
  check_id(child);
  const int v = size();
  const int p = parent_[child];
  parent_.push_back(p);
  depth_.push_back(p == kNone ? 0 : depth_[p] + 1);
  children_.push_back({child});
  adj_.emplace_back();
  parent_[child] = v;
  if (p == kNone) {
    root_ = v;
  } else {
    auto& sib = children_[p];
    std::replace(sib.begin(), sib.end(), child, v);
    std::sort(sib.begin(), sib.end());
  }
  // Shift depths of the subtree under the new node.
  std::vector<int> stack{child};
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    depth_[x] = depth_[parent_[x]] + 1;
    for (int c : children_[x]) stack.push_back(c);
  }
  return v;
}

void MixedStructure::add_edge(int a, int b) {
  check_id(a);
  check_id(b);
  if (a == b) throw std::invalid_argument("self-loop edge");
  if (has_edge(a, b)) return;
  raw_edges_.emplace_back(std::min(a, b), std::max(a, b));
  adj_[a].insert(std::upper_bound(adj_[a].begin(), adj_[a].end(), b), b);
  adj_[b].insert(std::upper_bound(adj_[b].begin(), adj_[b].end(), a), a);
  relational_ = true;
}

bool MixedStructure::operator==(const MixedStructure& o) const {
  return flavor_ == o.flavor_ && relational_ == o.relational_ &&
         parent_ == o.parent_ && edges() == o.edges() && point_ == o.point_ &&
         tip_ == o.tip_ && treat_tip_as_branch_ == o.treat_tip_as_branch_;
}

}  // namespace treeforge
