// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "treeforge/amalgam.hpp"

#include <algorithm>
#include <set>

#include "treeforge/core.hpp"
#include "treeforge/mutation.hpp"

namespace treeforge {
namespace {

std::vector<int> compose(const std::vector<int>& outer,
                         const std::vector<int>& inner) {
  std::vector<int> out(inner.size());
  for (size_t i = 0; i < inner.size(); ++i) out[i] = outer[inner[i]];
  return out;
}

void require_embedding(const MixedStructure& c, const MixedStructure& x,
                       const std::vector<int>& map, const char* name) {
  if (c.flavor() != x.flavor()) {
    throw std::invalid_argument(std::string(name) + ": flavor mismatch");
  }
  EmbeddingCheck check;
  try {
    check = is_embedding(c, x, map);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string(name) + ": " + e.what());
  }
  if (!check.ok) {
    throw std::invalid_argument(std::string(name) +
                                " is not an embedding (atom " + check.atom +
                                ")");
  }
}

// Nodes strictly between `top` and the nearest ancestor in `stop`, listed
// from `top` downward.
std::vector<int> chain_below(const MixedStructure& s, int top,
                             const std::vector<char>& stop) {
  std::vector<int> out;
  for (int x = s.parent(top); x != kNone && !stop[x]; x = s.parent(x)) {
    out.push_back(x);
  }
  return out;
}

}  // namespace

MixedStructure tree_reduct(const MixedStructure& s) {
  return MixedStructure(s.flavor(), s.parents(), {}, s.point(), s.tip(), false,
                        s.treat_tip_as_branch());
}

AmalgamCertificate certify_amalgam(const MixedStructure& c,
                                   const MixedStructure& a,
                                   const std::vector<int>& f,
                                   const MixedStructure& b,
                                   const std::vector<int>& g,
                                   const AmalgamResult& r) {
  AmalgamCertificate cert;
  cert.valid = validate_structure(r.amalgam).empty();
  if (!cert.valid) return cert;
  try {
    cert.left_ok = is_embedding(a, r.amalgam, r.left).ok;
    cert.right_ok = is_embedding(b, r.amalgam, r.right).ok;
  } catch (const std::invalid_argument&) {
    return cert;
  }
  cert.commutes = compose(r.left, f) == compose(r.right, g) &&
                  r.base == compose(r.left, f);
  NodeSet both = set_intersection(make_set(r.left), make_set(r.right));
  cert.strong = both == make_set(r.base) &&
                static_cast<int>(r.base.size()) == c.size();
  return cert;
}

AmalgamResult amalgamate_tree(const MixedStructure& c, const MixedStructure& a,
                              const std::vector<int>& f,
                              const MixedStructure& b,
                              const std::vector<int>& g) {
  if (a.relational() || b.relational() || c.relational()) {
    throw std::invalid_argument("tree amalgam expects no relational layer");
  }
  require_embedding(c, a, f, "left embedding");
  require_embedding(c, b, g, "right embedding");
  const Flavor flavor = a.flavor();
  const int na = a.size();
  const int nb = b.size();

  AmalgamResult r;
  r.left.resize(na);
  for (int x = 0; x < na; ++x) r.left[x] = x;
  r.right.assign(nb, kNone);
  std::vector<char> in_ca(na, 0);
  std::vector<char> in_cb(nb, 0);
  for (int i = 0; i < c.size(); ++i) {
    in_ca[f[i]] = 1;
    in_cb[g[i]] = 1;
    r.right[g[i]] = f[i];
  }
  int next = na;
  for (int y = 0; y < nb; ++y) {
    if (!in_cb[y]) r.right[y] = next++;
  }
  std::vector<int> parent(next, kNone);
  for (int x = 0; x < na; ++x) parent[x] = a.parent(x);
  for (int y = 0; y < nb; ++y) {
    if (!in_cb[y]) {
      parent[r.right[y]] = b.parent(y) == kNone ? kNone : r.right[b.parent(y)];
    }
  }

  int tip = kNone;
  if (c.size() == 0) {
    if (flavor == Flavor::kSemibranched) {
      // Stack B's branch chain above A's tip.
      parent[r.right[b.root()]] = a.tip();
      tip = r.right[b.tip()];
    } else {
      parent.push_back(kNone);
      parent[a.root()] = next;
      parent[r.right[b.root()]] = next;
    }
  } else {
    // Gap below each base node: A-points first, then B-points.
    for (int i = 0; i < c.size(); ++i) {
      auto gap_a = chain_below(a, f[i], in_ca);
      auto gap_b = chain_below(b, g[i], in_cb);
      if (gap_b.empty()) continue;
      std::vector<int> chain_b;
      for (int y : gap_b) chain_b.push_back(r.right[y]);
      if (active_mutant() == Mutant::kAmalgamInterleave) {
        std::reverse(chain_b.begin(), chain_b.end());
      }
      const int lo = gap_a.empty() ? a.parent(f[i]) : gap_a.front();
      parent[f[i]] = chain_b.front();
      for (size_t k = 0; k + 1 < chain_b.size(); ++k) {
        parent[chain_b[k]] = chain_b[k + 1];
      }
      parent[chain_b.back()] = lo;
    }
    if (flavor == Flavor::kSemibranched) {
      // Branch points above the base's top: A's below B's.
      const int m_b = g[c.tip()];
      tip = a.tip();
      if (b.tip() != m_b) {
        int lowest = b.tip();
        while (b.parent(lowest) != m_b) lowest = b.parent(lowest);
        parent[r.right[lowest]] = a.tip();
        tip = r.right[b.tip()];
      }
    }
  }

  r.amalgam = MixedStructure(flavor, std::move(parent), {},
                             flavor == Flavor::kPointed ? a.point() : kNone, tip,
                             false, a.treat_tip_as_branch());
  r.base = compose(r.left, f);
  r.certificate = certify_amalgam(c, a, f, b, g, r);
  if (!r.certificate.ok()) {
    throw AmalgamError("tree amalgam failed its certificate");
  }
  return r;
}

Graph::Graph(int n_in, std::vector<Edge> e) : n(n_in) {
  for (auto& [x, y] : e) {
    if (x < 0 || y < 0 || x >= n || y >= n || x == y) {
      throw std::invalid_argument("bad graph edge");
    }
    if (x > y) std::swap(x, y);
  }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  edges = std::move(e);
}

bool Graph::has_edge(int x, int y) const {
  if (x > y) std::swap(x, y);
  return std::binary_search(edges.begin(), edges.end(), Edge{x, y});
}

Graph graph_reduct(const MixedStructure& s) {
  return Graph(s.size(), s.edges());
}

bool is_graph_embedding(const Graph& source, const Graph& target,
                        const std::vector<int>& map) {
  if (static_cast<int>(map.size()) != source.n) return false;
  std::set<int> seen;
  for (int v : map) {
    if (v < 0 || v >= target.n || !seen.insert(v).second) return false;
  }
  for (int x = 0; x < source.n; ++x) {
    for (int y = x + 1; y < source.n; ++y) {
      if (source.has_edge(x, y) != target.has_edge(map[x], map[y])) {
        return false;
      }
    }
  }
  return true;
}

GraphAmalgam amalgamate_graph_free(const Graph& c, const Graph& a,
                                   const std::vector<int>& f, const Graph& b,
                                   const std::vector<int>& g) {
  if (!is_graph_embedding(c, a, f) || !is_graph_embedding(c, b, g)) {
    throw std::invalid_argument("graph amalgam inputs are not embeddings");
  }
  GraphAmalgam r;
  r.left.resize(a.n);
  for (int x = 0; x < a.n; ++x) r.left[x] = x;
  r.right.assign(b.n, kNone);
  for (int i = 0; i < c.n; ++i) r.right[g[i]] = f[i];
  int next = a.n;
  for (int y = 0; y < b.n; ++y) {
    if (r.right[y] == kNone) r.right[y] = next++;
  }
  std::vector<Edge> edges = a.edges;
  for (auto [x, y] : b.edges) edges.emplace_back(r.right[x], r.right[y]);
  r.amalgam = Graph(next, std::move(edges));
  r.base = compose(r.left, f);
  NodeSet both = set_intersection(make_set(r.left), make_set(r.right));
  r.strong = both == make_set(r.base) &&
             is_graph_embedding(a, r.amalgam, r.left) &&
             is_graph_embedding(b, r.amalgam, r.right) &&
             r.base == compose(r.right, g);
  if (!r.strong) throw AmalgamError("graph amalgam failed its certificate");
  return r;
}

AmalgamResult amalgamate_mixed(const MixedStructure& c, const MixedStructure& a,
                               const std::vector<int>& f,
                               const MixedStructure& b,
                               const std::vector<int>& g) {
  if (a.flavor() != b.flavor() || a.flavor() != c.flavor()) {
    throw std::invalid_argument("mixed amalgam: flavor mismatch");
  }
  require_embedding(c, a, f, "left embedding");
  require_embedding(c, b, g, "right embedding");

  AmalgamResult tree = amalgamate_tree(tree_reduct(c), tree_reduct(a), f,
                                       tree_reduct(b), g);
  GraphAmalgam graph = amalgamate_graph_free(graph_reduct(c), graph_reduct(a),
                                             f, graph_reduct(b), g);

  // Pad to equal size: fresh leaf children of the root on the tree side,
  // isolated vertices on the graph side.
  MixedStructure d = tree.amalgam;
  while (d.size() < graph.amalgam.n) d.add_leaf(d.root());
  const int n = d.size();
  const int graph_n = std::max(graph.amalgam.n, n);

  // Bijection h from tree ids to graph ids extending both sides.
  std::vector<int> h(n, kNone);
  std::vector<char> used(graph_n, 0);
  for (int x = 0; x < a.size(); ++x) {
    h[tree.left[x]] = graph.left[x];
    used[graph.left[x]] = 1;
  }
  for (int y = 0; y < b.size(); ++y) {
    h[tree.right[y]] = graph.right[y];
    used[graph.right[y]] = 1;
  }
  int spare = 0;
  for (int v = 0; v < n; ++v) {
    if (h[v] != kNone) continue;
    while (used[spare]) ++spare;
    h[v] = spare;
    used[spare] = 1;
  }
  std::vector<int> h_inv(graph_n, kNone);
  for (int v = 0; v < n; ++v) h_inv[h[v]] = v;
  std::vector<Edge> edges;
  for (auto [x, y] : graph.amalgam.edges) edges.emplace_back(h_inv[x], h_inv[y]);

  AmalgamResult r;
  r.amalgam = MixedStructure(a.flavor(), d.parents(), std::move(edges),
                             d.point(), d.tip(), true, d.treat_tip_as_branch());
  r.left = tree.left;
  r.right = tree.right;
  r.base = tree.base;
  r.certificate = certify_amalgam(c, a, f, b, g, r);
  if (!r.certificate.ok()) {
    throw AmalgamError("mixed amalgam failed its certificate");
  }
  return r;
}

AmalgamResult joint_embed(const MixedStructure& a, const MixedStructure& b) {
  if (a.flavor() != b.flavor()) {
    throw std::invalid_argument("joint embedding: flavor mismatch");
  }
  NodeSet ca = closure(a, {});
  NodeSet cb = closure(b, {});
  if (ca.size() != cb.size()) {
    throw std::invalid_argument("joint embedding: constant substructures differ");
  }
  const bool relational = a.relational() || b.relational();
  MixedStructure base;
  if (ca.empty()) {
    base = MixedStructure(a.flavor(), {}, {}, kNone, kNone, relational);
  } else {
    base = MixedStructure::singleton(a.flavor(), relational);
  }
  std::vector<int> f(ca.begin(), ca.end());
  std::vector<int> g(cb.begin(), cb.end());
  if (relational) {
    MixedStructure ra = a;
    MixedStructure rb = b;
    ra.set_relational(true);
    rb.set_relational(true);
    return amalgamate_mixed(base, ra, f, rb, g);
  }
  return amalgamate_tree(base, a, f, b, g);
}

}  // namespace treeforge
