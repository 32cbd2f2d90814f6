// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "treeforge/core.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace treeforge {

std::vector<std::string> validate_structure(const MixedStructure& s) {
  std::vector<std::string> report;
  const int n = s.size();
  const auto& parent = s.parents();
  if (n == 0) {
    report.emplace_back("empty");
    return report;
  }
  int roots = 0;
  bool range_ok = true;
  for (int v = 0; v < n; ++v) {
    if (parent[v] == kNone) {
      ++roots;
    } else if (parent[v] < 0 || parent[v] >= n) {
      range_ok = false;
    }
  }
  if (!range_ok) report.emplace_back("parent range");
  if (roots != 1) report.emplace_back("root count");
  if (range_ok) {
    bool cyclic = false;
    for (int v = 0; v < n && !cyclic; ++v) {
      int x = v;
      for (int steps = 0; x != kNone; ++steps) {
        if (steps > n) {
          cyclic = true;
          break;
        }
        x = parent[x];
      }
    }
    if (cyclic) report.emplace_back("acyclicity");
  }

  std::set<Edge> seen;
  bool self_loop = false;
  bool edge_range = false;
  bool duplicate = false;
  for (auto [a, b] : s.raw_edges()) {
    if (a < 0 || b < 0 || a >= n || b >= n) {
      edge_range = true;
      continue;
    }
    if (a == b) {
      self_loop = true;
      continue;
    }
    if (!seen.insert({std::min(a, b), std::max(a, b)}).second) duplicate = true;
  }
  if (edge_range) report.emplace_back("edge range");
  if (self_loop) report.emplace_back("self-loop");
  if (duplicate) report.emplace_back("duplicate edge");
  if (!s.raw_edges().empty() && !s.relational()) {
    report.emplace_back("relational layer");
  }

  const bool has_point = s.point() != kNone;
  const bool has_tip = s.tip() != kNone;
  bool mismatch = false;
  switch (s.flavor()) {
    case Flavor::kPlain: mismatch = has_point || has_tip; break;
    case Flavor::kPointed: mismatch = !has_point || has_tip; break;
    case Flavor::kSemibranched: mismatch = has_point || !has_tip; break;
  }
  if (s.treat_tip_as_branch() && s.flavor() != Flavor::kSemibranched) {
    mismatch = true;
  }
  if (mismatch) report.emplace_back("flavor mismatch");
  if (has_point && (s.point() < 0 || s.point() >= n)) {
    report.emplace_back("point range");
  }
  if (has_tip && (s.tip() < 0 || s.tip() >= n)) {
    report.emplace_back("tip range");
  }
  return report;
}

int meet(const MixedStructure& s, int a, int b) { return s.meet(a, b); }

NodeSet meet_closure(const MixedStructure& s, const NodeSet& x) {
  std::vector<int> out(x.begin(), x.end());
  for (size_t i = 0; i < x.size(); ++i) {
    for (size_t j = i + 1; j < x.size(); ++j) out.push_back(s.meet(x[i], x[j]));
  }
  return make_set(std::move(out));
}

namespace {

int deepest(const MixedStructure& s, const std::vector<int>& chain) {
  int best = kNone;
  for (int v : chain) {
    if (best == kNone || s.depth(v) > s.depth(best)) best = v;
  }
  return best;
}

}  // namespace

NodeSet closure(const MixedStructure& s, const NodeSet& x) {
  switch (s.flavor()) {
    case Flavor::kPlain:
      return meet_closure(s, x);
    case Flavor::kPointed: {
      NodeSet with_point = x;
      with_point.push_back(s.point());
      return meet_closure(s, make_set(std::move(with_point)));
    }
    case Flavor::kSemibranched: {
      if (x.empty()) return {};
      std::vector<int> proj;
      proj.reserve(x.size());
      for (int v : x) proj.push_back(s.project(v));
      NodeSet with_top = x;
      with_top.push_back(deepest(s, proj));
      return meet_closure(s, make_set(std::move(with_top)));
    }
  }
  return x;
}

bool is_closed(const MixedStructure& s, const NodeSet& x) {
  return closure(s, x) == x;
}

int semibranch_projection(const MixedStructure& s, int a) {
  if (s.flavor() != Flavor::kSemibranched) {
    throw std::invalid_argument("projection needs the semibranched flavor");
  }
  return s.project(a);
}

std::vector<NodeSet> cones_at(const MixedStructure& s, int g) {
  std::vector<NodeSet> cones;
  for (int c : s.children(g)) {
    std::vector<int> block;
    std::vector<int> stack{c};
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      block.push_back(x);
      for (int y : s.children(x)) stack.push_back(y);
    }
    cones.push_back(make_set(std::move(block)));
  }
  std::sort(cones.begin(), cones.end(),
            [](const NodeSet& a, const NodeSet& b) { return a[0] < b[0]; });
  return cones;
}

int cone_index(const MixedStructure& s, int g, int x) {
  if (!s.lt(g, x)) return kNone;
  auto cones = cones_at(s, g);
  for (size_t i = 0; i < cones.size(); ++i) {
    if (set_contains(cones[i], x)) return static_cast<int>(i);
  }
  return kNone;
}

SemibranchSpace semibranch_space(const MixedStructure& s) {
  SemibranchSpace out;
  const int n = s.size();
  out.index_of_node.assign(n, kNone);
  // Downward-closed chains are exactly root paths; walk them in preorder.
  std::vector<std::pair<int, NodeSet>> stack{{s.root(), {s.root()}}};
  while (!stack.empty()) {
    auto [v, chain] = std::move(stack.back());
    stack.pop_back();
    out.index_of_node[v] = static_cast<int>(out.semibranches.size());
    out.semibranches.push_back(chain);
    const auto& kids = s.children(v);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      NodeSet next = chain;
      next.push_back(*it);
      stack.emplace_back(*it, make_set(std::move(next)));
    }
  }
  std::set<int> hit;
  for (int v = 0; v < n; ++v) {
    const NodeSet& gamma = out.semibranches[out.index_of_node[v]];
    bool ok = !gamma.empty();
    for (int x : gamma) ok = ok && s.leq(x, v);
    ok = ok && static_cast<int>(gamma.size()) == s.depth(v) + 1;
    if (ok) hit.insert(out.index_of_node[v]);
  }
  out.bijective = static_cast<int>(hit.size()) == n &&
                  out.semibranches.size() == static_cast<size_t>(n);
  return out;
}

std::string QfTypeCode::to_string() const {
  std::ostringstream os;
  os << flavor_name(flavor) << '/' << arity << '/' << augmented << "|m";
  for (const auto& t : meet_rel) os << ' ' << t[0] << t[1] << t[2];
  os << "|e";
  for (const auto& t : edge_rel) {
    os << ' ' << t[0] << ',' << t[1] << '-' << t[2] << ',' << t[3];
  }
  os << "|q";
  for (const auto& t : eq_rel) os << ' ' << t[0] << '=' << t[1];
  return os.str();
}

QfTypeCode qf_type(const MixedStructure& s, const std::vector<int>& tuple) {
  QfTypeCode code;
  code.flavor = s.flavor();
  code.arity = static_cast<int>(tuple.size());
  std::vector<int> aug = tuple;
  if (s.flavor() == Flavor::kPointed) {
    aug.push_back(s.point());
  } else if (s.flavor() == Flavor::kSemibranched && !tuple.empty()) {
    std::vector<int> proj;
    for (int v : tuple) proj.push_back(s.project(v));
    aug.push_back(deepest(s, proj));
  }
  const int m = static_cast<int>(aug.size());
  code.augmented = m;

  std::vector<std::vector<int>> mt(m, std::vector<int>(m));
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) mt[i][j] = mt[j][i] = s.meet(aug[i], aug[j]);
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        if (s.leq(mt[i][j], aug[k])) code.meet_rel.push_back({i, j, k});
      }
    }
  }
  for (int i = 0; i < code.arity; ++i) {
    for (int j = i + 1; j < code.arity; ++j) {
      if (aug[i] == aug[j]) code.eq_rel.push_back({i, j});
    }
  }
  if (s.relational()) {
    std::map<int, std::array<int, 2>> term_of;
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) term_of.try_emplace(mt[i][j], std::array{i, j});
    }
    std::vector<std::pair<std::array<int, 2>, int>> terms;
    for (const auto& [v, t] : term_of) terms.emplace_back(t, v);
    std::sort(terms.begin(), terms.end());
    for (size_t p = 0; p < terms.size(); ++p) {
      for (size_t q = p + 1; q < terms.size(); ++q) {
        if (s.has_edge(terms[p].second, terms[q].second)) {
          code.edge_rel.push_back({terms[p].first[0], terms[p].first[1],
                                   terms[q].first[0], terms[q].first[1]});
        }
      }
    }
  }
  return code;
}

EmbeddingCheck is_embedding(const MixedStructure& source,
                            const MixedStructure& target,
                            const std::vector<int>& map) {
  const int n = source.size();
  if (static_cast<int>(map.size()) != n) {
    throw std::invalid_argument("embedding map has the wrong length");
  }
  std::set<int> image;
  for (int v : map) {
    if (v < 0 || v >= target.size()) {
      throw std::invalid_argument("embedding map leaves the target");
    }
    if (!image.insert(v).second) {
      throw std::invalid_argument("embedding map is not injective");
    }
  }
  EmbeddingCheck out;
  auto fail = [&](std::string atom, std::vector<int> witness) {
    out.ok = false;
    out.atom = std::move(atom);
    out.witness = std::move(witness);
    return out;
  };
  if (source.flavor() != target.flavor()) return fail("flavor", {});
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (map[source.meet(a, b)] != target.meet(map[a], map[b])) {
        return fail("meet", {a, b});
      }
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (source.leq(a, b) != target.leq(map[a], map[b])) {
        return fail("order", {a, b});
      }
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (source.has_edge(a, b) != target.has_edge(map[a], map[b])) {
        return fail("edge", {a, b});
      }
    }
  }
  if (source.flavor() == Flavor::kPointed &&
      (source.point() < 0 || source.point() >= n ||
       map[source.point()] != target.point())) {
    return fail("point", {source.point()});
  }
  if (source.flavor() == Flavor::kSemibranched) {
    for (int a = 0; a < n; ++a) {
      if (source.in_branch(a) != target.in_branch(map[a])) {
        return fail("semibranch", {a});
      }
    }
    for (int a = 0; a < n; ++a) {
      if (map[source.project(a)] != target.project(map[a])) {
        return fail("projection", {a});
      }
    }
  }
  return out;
}

Substructure induced_substructure(const MixedStructure& s, const NodeSet& x) {
  if (!is_closed(s, x)) {
    throw std::invalid_argument("induced substructure needs a closed set");
  }
  Substructure out;
  out.ids = x;
  std::map<int, int> local;
  for (size_t i = 0; i < x.size(); ++i) local[x[i]] = static_cast<int>(i);
  std::vector<int> parent(x.size(), kNone);
  for (size_t i = 0; i < x.size(); ++i) {
    for (int p = s.parent(x[i]); p != kNone; p = s.parent(p)) {
      if (auto it = local.find(p); it != local.end()) {
        parent[i] = it->second;
        break;
      }
    }
  }
  std::vector<Edge> edges;
  for (size_t i = 0; i < x.size(); ++i) {
    for (size_t j = i + 1; j < x.size(); ++j) {
      if (s.has_edge(x[i], x[j])) {
        edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  int point = kNone;
  int tip = kNone;
  if (s.flavor() == Flavor::kPointed) point = local.at(s.point());
  if (s.flavor() == Flavor::kSemibranched && !x.empty()) {
    std::vector<int> in_gamma;
    for (int v : x) {
      if (s.in_branch(v)) in_gamma.push_back(v);
    }
    tip = local.at(deepest(s, in_gamma));
  }
  out.structure = MixedStructure(s.flavor(), std::move(parent), std::move(edges),
                                 point, tip, s.relational(),
                                 s.treat_tip_as_branch());
  return out;
}

}  // namespace treeforge
