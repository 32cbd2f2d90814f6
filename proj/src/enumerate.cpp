// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "treeforge/enumerate.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "treeforge/core.hpp"

namespace treeforge {
namespace {

constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 21;

std::vector<std::vector<int>> children_of(const std::vector<int>& parent) {
  std::vector<std::vector<int>> kids(parent.size());
  for (size_t v = 0; v < parent.size(); ++v) {
    if (parent[v] != kNone) kids[parent[v]].push_back(static_cast<int>(v));
  }
  return kids;
}

int root_of(const std::vector<int>& parent) {
  for (size_t v = 0; v < parent.size(); ++v) {
    if (parent[v] == kNone) return static_cast<int>(v);
  }
  return kNone;
}

// AHU subtree codes.
std::vector<std::string> subtree_codes(const std::vector<int>& parent) {
  auto kids = children_of(parent);
  std::vector<std::string> code(parent.size());
  std::vector<int> order;
  std::vector<int> stack{root_of(parent)};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (int c : kids[v]) stack.push_back(c);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    std::vector<std::string> parts;
    for (int c : kids[*it]) parts.push_back(code[c]);
    std::sort(parts.begin(), parts.end());
    std::string s = "(";
    for (const auto& p : parts) s += p;
    s += ")";
    code[*it] = std::move(s);
  }
  return code;
}

std::vector<int> canonical_relabel(const std::vector<int>& parent) {
  auto kids = children_of(parent);
  auto code = subtree_codes(parent);
  std::vector<int> out(parent.size(), kNone);
  std::vector<int> new_id(parent.size(), kNone);
  int next = 0;
  std::vector<int> stack{root_of(parent)};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    new_id[v] = next++;
    if (parent[v] != kNone) out[new_id[v]] = new_id[parent[v]];
    auto ks = kids[v];
    std::sort(ks.begin(), ks.end(), [&](int a, int b) {
      return code[a] != code[b] ? code[a] < code[b] : a < b;
    });
    for (auto it = ks.rbegin(); it != ks.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

}  // namespace

std::uint64_t enumeration_budget() {
  if (const char* env = std::getenv("TREEFORGE_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return kDefaultBudget;
}

std::vector<std::vector<int>> rooted_trees(int n) {
  if (n <= 0) return {};
  std::map<std::string, std::vector<int>> by_code;
  std::vector<int> parent(n, 0);
  parent[0] = kNone;
  // Odometer over parent[i] in [0, i).
  while (true) {
    auto canon = canonical_relabel(parent);
    by_code.try_emplace(subtree_codes(canon)[0], canon);
    int i = n - 1;
    while (i >= 1) {
      if (parent[i] + 1 < i) {
        ++parent[i];
        break;
      }
      parent[i] = 0;
      --i;
    }
    if (i < 1) break;
  }
  std::vector<std::vector<int>> out;
  for (auto& [code, p] : by_code) out.push_back(std::move(p));
  return out;
}

std::vector<std::vector<int>> tree_automorphisms(
    const std::vector<int>& parent) {
  const int n = static_cast<int>(parent.size());
  std::vector<std::vector<int>> out;
  if (n == 0) return out;
  auto kids = children_of(parent);
  auto code = subtree_codes(parent);
  std::vector<int> order;
  {
    std::vector<int> queue{root_of(parent)};
    for (size_t h = 0; h < queue.size(); ++h) {
      order.push_back(queue[h]);
      for (int c : kids[queue[h]]) queue.push_back(c);
    }
  }
  std::vector<int> img(n, kNone);
  std::vector<char> used(n, 0);
  std::function<void(int)> rec = [&](int pos) {
    if (pos == n) {
      out.push_back(img);
      return;
    }
    int v = order[pos];
    std::vector<int> cands;
    if (parent[v] == kNone) {
      cands.push_back(v);
    } else {
      for (int c : kids[img[parent[v]]]) {
        if (!used[c] && code[c] == code[v]) cands.push_back(c);
      }
    }
    for (int c : cands) {
      img[v] = c;
      used[c] = 1;
      rec(pos + 1);
      used[c] = 0;
      img[v] = kNone;
    }
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

void for_each_structure(Flavor flavor, int n, bool with_edges,
                        const std::function<void(const MixedStructure&)>& fn) {
  if (n <= 0) return;
  auto trees = rooted_trees(n);
  const int pairs = n * (n - 1) / 2;
  const std::uint64_t placements = flavor == Flavor::kPlain ? 1 : n;
  const std::uint64_t masks = with_edges ? (std::uint64_t{1} << pairs) : 1;
  const std::uint64_t estimate = trees.size() * placements * masks;
  if (estimate > enumeration_budget()) {
    throw BudgetExceeded("enumeration of " + std::to_string(estimate) +
                             " candidates exceeds the budget of " +
                             std::to_string(enumeration_budget()),
                         estimate);
  }
  std::vector<std::vector<int>> pair_id(n, std::vector<int>(n, -1));
  std::vector<Edge> pair_of;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      pair_id[i][j] = pair_id[j][i] = static_cast<int>(pair_of.size());
      pair_of.emplace_back(i, j);
    }
  }
  for (const auto& tree : trees) {
    auto auts = tree_automorphisms(tree);
    std::vector<std::vector<int>> bit_map;
    for (const auto& s : auts) {
      std::vector<int> m(pairs);
      for (int b = 0; b < pairs; ++b) {
        m[b] = pair_id[s[pair_of[b].first]][s[pair_of[b].second]];
      }
      bit_map.push_back(std::move(m));
    }
    for (std::uint64_t pi = 0; pi < placements; ++pi) {
      const int p = flavor == Flavor::kPlain ? kNone : static_cast<int>(pi);
      for (std::uint64_t mask = 0; mask < masks; ++mask) {
        bool canonical = true;
        for (size_t a = 0; a < auts.size() && canonical; ++a) {
          const int pp = p == kNone ? kNone : auts[a][p];
          if (pp < p) {
            canonical = false;
            break;
          }
          if (pp > p) continue;
          std::uint64_t image = 0;
          for (int b = 0; b < pairs; ++b) {
            if (mask >> b & 1) image |= std::uint64_t{1} << bit_map[a][b];
          }
          if (image < mask) canonical = false;
        }
        if (!canonical) continue;
        std::vector<Edge> edges;
        for (int b = 0; b < pairs; ++b) {
          if (mask >> b & 1) edges.push_back(pair_of[b]);
        }
        fn(MixedStructure(flavor, tree, std::move(edges),
                          flavor == Flavor::kPointed ? p : kNone,
                          flavor == Flavor::kSemibranched ? p : kNone,
                          with_edges));
      }
    }
  }
}

std::vector<MixedStructure> enumerate_structures(Flavor flavor, int n,
                                                 bool with_edges) {
  std::vector<MixedStructure> out;
  for_each_structure(flavor, n, with_edges,
                     [&](const MixedStructure& s) { out.push_back(s); });
  return out;
}

std::vector<MixedStructure> enumerate_structures_upto(Flavor flavor, int max_n,
                                                      bool with_edges) {
  std::vector<MixedStructure> out;
  for (int n = 1; n <= max_n; ++n) {
    for_each_structure(flavor, n, with_edges,
                       [&](const MixedStructure& s) { out.push_back(s); });
  }
  return out;
}

std::vector<std::vector<int>> structure_automorphisms(const MixedStructure& s) {
  std::vector<std::vector<int>> out;
  for (auto& perm : tree_automorphisms(s.parents())) {
    bool ok = true;
    if (s.flavor() == Flavor::kPointed) ok = perm[s.point()] == s.point();
    if (s.flavor() == Flavor::kSemibranched) ok = perm[s.tip()] == s.tip();
    for (int a = 0; a < s.size() && ok; ++a) {
      for (int b : s.neighbors(a)) {
        if (!s.has_edge(perm[a], perm[b])) {
          ok = false;
          break;
        }
      }
    }
    if (ok) out.push_back(std::move(perm));
  }
  return out;
}

std::vector<std::vector<int>> embeddings_between(const MixedStructure& source,
                                                 const MixedStructure& target) {
  std::vector<std::vector<int>> out;
  if (source.flavor() != target.flavor()) return out;
  const int n = source.size();
  const int m = target.size();
  std::vector<int> map(n, kNone);
  std::vector<char> used(m, 0);
  // Pairwise atoms are checked as soon as both ends are placed.
  auto consistent = [&](int i) {
    const int x = map[i];
    if (source.flavor() == Flavor::kPointed &&
        (i == source.point()) != (x == target.point())) {
      return false;
    }
    if (source.flavor() == Flavor::kSemibranched &&
        source.in_branch(i) != target.in_branch(x)) {
      return false;
    }
    for (int j = 0; j < i; ++j) {
      const int y = map[j];
      if (source.leq(i, j) != target.leq(x, y)) return false;
      if (source.leq(j, i) != target.leq(y, x)) return false;
      if (source.has_edge(i, j) != target.has_edge(x, y)) return false;
    }
    return true;
  };
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      if (is_embedding(source, target, map).ok) out.push_back(map);
      return;
    }
    for (int x = 0; x < m; ++x) {
      if (used[x]) continue;
      map[i] = x;
      if (consistent(i)) {
        used[x] = 1;
        rec(i + 1);
        used[x] = 0;
      }
      map[i] = kNone;
    }
  };
  rec(0);
  return out;
}

}  // namespace treeforge
