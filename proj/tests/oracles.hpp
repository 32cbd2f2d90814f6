// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference implementations used only by tests. They work from
// the raw parent array and never call the library's meet or closure.

#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "treeforge/structure.hpp"

namespace treeforge::oracle {

inline std::set<int> ancestors(const MixedStructure& s, int v) {
  std::set<int> out;
  for (int x = v; x != kNone; x = s.parents()[x]) out.insert(x);
  return out;
}

inline bool below(const MixedStructure& s, int a, int b) {
  return ancestors(s, b).count(a) > 0;
}

// Deepest common ancestor by set intersection.
inline int lca(const MixedStructure& s, int a, int b) {
  auto aa = ancestors(s, a);
  auto bb = ancestors(s, b);
  int best = kNone;
  size_t best_depth = 0;
  for (int x : aa) {
    if (!bb.count(x)) continue;
    size_t d = ancestors(s, x).size();
    if (best == kNone || d > best_depth) {
      best = x;
      best_depth = d;
    }
  }
  return best;
}

inline int tip_projection(const MixedStructure& s, int a) {
  return lca(s, a, s.tip());
}

// Fixpoint closure under binary meets and the flavor's functions.
inline std::set<int> closure(const MixedStructure& s, std::set<int> x) {
  if (s.flavor() == Flavor::kPointed) x.insert(s.point());
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> cur(x.begin(), x.end());
    for (int a : cur) {
      if (s.flavor() == Flavor::kSemibranched) {
        changed |= x.insert(tip_projection(s, a)).second;
      }
      for (int b : cur) changed |= x.insert(lca(s, a, b)).second;
    }
  }
  return x;
}

// Serializes the substructure generated by a tuple, tuple positions first,
// minimized over orderings of the remaining generated elements.
inline std::string labeled_canonical_form(const MixedStructure& s,
                                          const std::vector<int>& tuple) {
  std::set<int> gen = oracle::closure(s, std::set<int>(tuple.begin(), tuple.end()));
  std::vector<int> rest;
  for (int v : gen) {
    if (std::find(tuple.begin(), tuple.end(), v) == tuple.end()) {
      rest.push_back(v);
    }
  }
  std::sort(rest.begin(), rest.end());
  std::string best;
  bool first = true;
  do {
    std::vector<int> seq = tuple;
    seq.insert(seq.end(), rest.begin(), rest.end());
    std::string out;
    for (int a : seq) {
      for (int b : seq) {
        out += a == b ? '=' : (below(s, a, b) ? '<' : '.');
        out += s.has_edge(a, b) ? 'E' : '_';
      }
      if (s.flavor() == Flavor::kPointed) out += a == s.point() ? 'P' : 'p';
      if (s.flavor() == Flavor::kSemibranched) {
        out += below(s, a, s.tip()) ? 'G' : 'g';
        int pa = tip_projection(s, a);
        for (int b : seq) out += b == pa ? '1' : '0';
      }
      out += '|';
    }
    if (first || out < best) best = out;
    first = false;
  } while (std::next_permutation(rest.begin(), rest.end()));
  return best;
}

// Brute-force canonical form of a whole structure over all relabelings.
inline std::string structure_canonical_form(const MixedStructure& s) {
  std::vector<int> perm(s.size());
  for (int i = 0; i < s.size(); ++i) perm[i] = i;
  std::string best;
  bool first = true;
  do {
    // perm[new] = old
    std::string out;
    for (int i = 0; i < s.size(); ++i) {
      for (int j = 0; j < s.size(); ++j) {
        out += s.parents()[perm[j]] == perm[i] ? 'p' : '.';
        out += s.has_edge(perm[i], perm[j]) ? 'e' : '.';
      }
      if (s.point() != kNone) out += perm[i] == s.point() ? 'P' : '.';
      if (s.tip() != kNone) out += perm[i] == s.tip() ? 'T' : '.';
      out += '|';
    }
    if (first || out < best) best = out;
    first = false;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Atom-by-atom embedding check from ancestor sets.
inline bool is_embedding(const MixedStructure& src, const MixedStructure& dst,
                         const std::vector<int>& map) {
  if (src.flavor() != dst.flavor()) return false;
  if (static_cast<int>(map.size()) != src.size()) return false;
  std::set<int> img(map.begin(), map.end());
  if (static_cast<int>(img.size()) != src.size()) return false;
  for (int a = 0; a < src.size(); ++a) {
    for (int b = 0; b < src.size(); ++b) {
      if (below(src, a, b) != below(dst, map[a], map[b])) return false;
      if (map[lca(src, a, b)] != lca(dst, map[a], map[b])) return false;
      if (a != b && src.has_edge(a, b) != dst.has_edge(map[a], map[b])) {
        return false;
      }
    }
    if (src.flavor() == Flavor::kPointed &&
        (a == src.point()) != (map[a] == dst.point())) {
      return false;
    }
    if (src.flavor() == Flavor::kSemibranched &&
        map[tip_projection(src, a)] != tip_projection(dst, map[a])) {
      return false;
    }
  }
  return true;
}

// Parent array is a rooted tree with in-range decorations.
inline bool is_tree(const MixedStructure& s) {
  int roots = 0;
  for (int v = 0; v < s.size(); ++v) {
    if (s.parents()[v] == kNone) {
      ++roots;
      continue;
    }
    if (s.parents()[v] < 0 || s.parents()[v] >= s.size()) return false;
    int x = v;
    for (int k = 0; k <= s.size() && x != kNone; ++k) x = s.parents()[x];
    if (x != kNone) return false;
  }
  return roots == 1;
}

}  // namespace treeforge::oracle
