// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "treeforge/structure.hpp"

namespace treeforge {

// Thrown when a constructed amalgam fails its own certificate. Only reachable
// with a mutant active or a bug.
class AmalgamError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AmalgamCertificate {
  bool valid = false;      // amalgam passes validate_structure
  bool left_ok = false;    // left is an embedding of A
  bool right_ok = false;   // right is an embedding of B
  bool commutes = false;   // left o f == right o g
  bool strong = false;     // image(left) & image(right) == image(base)
  bool ok() const { return valid && left_ok && right_ok && commutes && strong; }
};

struct AmalgamResult {
  MixedStructure amalgam;
  std::vector<int> left;   // A -> amalgam
  std::vector<int> right;  // B -> amalgam
  std::vector<int> base;   // C -> amalgam, equal to left o f
  AmalgamCertificate certificate;
};

// Recomputes every certificate field from scratch.
AmalgamCertificate certify_amalgam(const MixedStructure& c,
                                   const MixedStructure& a,
                                   const std::vector<int>& f,
                                   const MixedStructure& b,
                                   const std::vector<int>& g,
                                   const AmalgamResult& r);

// Strong amalgam of A <-f- C -g-> B for tree flavors without relational
// layer. Ids of A are kept, ids of B \ g(C) follow in B order, a fresh root
// (empty Plain base) comes last. Inside each gap of C, new A-points sit below
// new B-points. Throws std::invalid_argument when f or g is not an embedding.
AmalgamResult amalgamate_tree(const MixedStructure& c, const MixedStructure& a,
                              const std::vector<int>& f,
                              const MixedStructure& b,
                              const std::vector<int>& g);

// Pure edge-only structure.
struct Graph {
  int n = 0;
  std::vector<Edge> edges;  // normalized (i < j), sorted, duplicate-free

  Graph() = default;
  Graph(int n, std::vector<Edge> edges);
  bool has_edge(int a, int b) const;
};

Graph graph_reduct(const MixedStructure& s);
bool is_graph_embedding(const Graph& source, const Graph& target,
                        const std::vector<int>& map);

struct GraphAmalgam {
  Graph amalgam;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<int> base;
  bool strong = false;
};

// Free amalgam: disjoint union over C with no edges across A \ C and B \ C.
GraphAmalgam amalgamate_graph_free(const Graph& c, const Graph& a,
                                   const std::vector<int>& f, const Graph& b,
                                   const std::vector<int>& g);

// Amalgamates the tree and edge reducts separately, pads the smaller result
// and glues them by a bijection extending both sides.
AmalgamResult amalgamate_mixed(const MixedStructure& c, const MixedStructure& a,
                               const std::vector<int>& f,
                               const MixedStructure& b,
                               const std::vector<int>& g);

// Amalgam over the substructures generated by the empty set. Throws
// std::invalid_argument when flavors or those substructures differ.
AmalgamResult joint_embed(const MixedStructure& a, const MixedStructure& b);

// Same structure without the edge layer.
MixedStructure tree_reduct(const MixedStructure& s);

}  // namespace treeforge
