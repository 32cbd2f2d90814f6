// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "treeforge/indep.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "treeforge/amalgam.hpp"
#include "treeforge/mutation.hpp"

namespace treeforge {
namespace {

int resolve_gamma(const MixedStructure& s, const Relation& rel) {
  int g = rel.gamma;
  if (g == kNone && s.flavor() == Flavor::kPointed) g = s.point();
  if (g == kNone) throw std::invalid_argument("cone relation needs a base point");
  if (g < 0 || g >= s.size()) throw std::invalid_argument("base point out of range");
  return g;
}

void check_ids(const MixedStructure& s, const NodeSet& x) {
  for (int v : x) {
    if (v < 0 || v >= s.size()) throw std::invalid_argument("node id out of range");
  }
}

bool betweenness_fails(const MixedStructure& s, const NodeSet& cc, int a, int b) {
  if (!s.leq(b, a)) return false;
  for (int c : cc) {
    if (s.leq(b, c) && s.leq(c, a)) return false;
  }
  return true;
}

// With `same_projection` the pair is only considered when pi(a) = pi(b).
bool separation_fails(const MixedStructure& s, const NodeSet& cc, int a, int b,
                      bool same_projection) {
  if (same_projection && s.project(a) != s.project(b)) return false;
  const int m = s.meet(a, b);
  if (set_contains(cc, m)) return false;
  for (int c : cc) {
    if (s.meet(a, c) != s.meet(b, c)) return false;
  }
  return true;
}

IndepVerdict tree_clauses(const MixedStructure& s, const NodeSet& ac,
                          const NodeSet& bc, const NodeSet& cc,
                          bool same_projection, bool honor_mutants) {
  IndepVerdict v;
  const bool skip_i = honor_mutants && active_mutant() == Mutant::kConeClauseI;
  const bool skip_ii = honor_mutants && active_mutant() == Mutant::kConeClauseII;
  if (!skip_i) {
    for (int a : ac) {
      for (int b : bc) {
        if (betweenness_fails(s, cc, a, b)) {
          return {false, IndepClause::kBetweenness, IndepSide::kTree, {a, b}};
        }
      }
    }
  }
  if (!skip_ii) {
    for (int a : ac) {
      for (int b : bc) {
        if (separation_fails(s, cc, a, b, same_projection)) {
          return {false, IndepClause::kSeparation, IndepSide::kTree,
                  {a, b, s.meet(a, b)}};
        }
      }
    }
  }
  return v;
}


bool same_type_over(const MixedStructure& s, const NodeSet& c, int a, int a2) {
  std::vector<int> t1(c.begin(), c.end());
  std::vector<int> t2 = t1;
  t1.push_back(a);
  t2.push_back(a2);
  return qf_type(s, t1) == qf_type(s, t2);
}

bool is_cone_kind(RelationKind k) {
  return k == RelationKind::kCone || k == RelationKind::kMixedCone;
}

}  // namespace

std::map<int, int> match_generated(const MixedStructure& from,
                                   const std::vector<int>& p,
                                   const MixedStructure& to,
                                   const std::vector<int>& q) {
  std::map<int, int> m;
  for (size_t i = 0; i < p.size(); ++i) m[p[i]] = q[i];
  if (from.flavor() == Flavor::kPointed) m[from.point()] = to.point();
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::pair<int, int>> cur(m.begin(), m.end());
    for (auto [x, y] : cur) {
      if (from.flavor() == Flavor::kSemibranched) {
        int px = from.project(x);
        if (!m.contains(px)) {
          m[px] = to.project(y);
          grew = true;
        }
      }
      for (auto [x2, y2] : cur) {
        int mx = from.meet(x, x2);
        if (!m.contains(mx)) {
          m[mx] = to.meet(y, y2);
          grew = true;
        }
      }
    }
  }
  return m;
}

std::string_view relation_name(RelationKind k) {
  switch (k) {
    case RelationKind::kCone: return "cone";
    case RelationKind::kSemibranch: return "semibranch";
    case RelationKind::kGraphFree: return "graph";
    case RelationKind::kMixedCone: return "mixed-cone";
    case RelationKind::kMixedSemibranch: return "mixed-semibranch";
  }
  return "?";
}

RelationKind parse_relation(std::string_view name) {
  for (auto k : {RelationKind::kCone, RelationKind::kSemibranch,
                 RelationKind::kGraphFree, RelationKind::kMixedCone,
                 RelationKind::kMixedSemibranch}) {
    if (relation_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown relation: " + std::string(name));
}

std::string_view clause_name(IndepClause c) {
  switch (c) {
    case IndepClause::kNone: return "none";
    case IndepClause::kBetweenness: return "i";
    case IndepClause::kSeparation: return "ii";
    case IndepClause::kGraphIntersection: return "graph-intersection";
    case IndepClause::kGraphCrossEdge: return "graph-cross-edge";
  }
  return "?";
}

std::string_view side_name(IndepSide s) {
  switch (s) {
    case IndepSide::kNone: return "none";
    case IndepSide::kTree: return "tree";
    case IndepSide::kGraph: return "graph";
  }
  return "?";
}

std::string_view extension_case_name(ExtensionCase c) {
  switch (c) {
    case ExtensionCase::kInBase: return "in-base";
    case ExtensionCase::kBelowAll: return "below-all";
    case ExtensionCase::kAboveAll: return "above-all";
    case ExtensionCase::kBetween: return "between";
    case ExtensionCase::kSearch: return "search";
  }
  return "?";
}

NodeSet cone_closure(const MixedStructure& s, int gamma, const NodeSet& x) {
  NodeSet g = x;
  g.push_back(gamma);
  return meet_closure(s, make_set(g));
}

IndepVerdict cone_indep(const MixedStructure& s, int gamma, const NodeSet& a,
                        const NodeSet& b, const NodeSet& c) {
  if (gamma < 0 || gamma >= s.size()) {
    throw std::invalid_argument("base point out of range");
  }
  check_ids(s, a);
  check_ids(s, b);
  check_ids(s, c);
  const NodeSet ac = cone_closure(s, gamma, set_union(a, c));
  const NodeSet bc = cone_closure(s, gamma, set_union(b, c));
  const NodeSet cc = cone_closure(s, gamma, c);
  return tree_clauses(s, ac, bc, cc, false, true);
}

IndepVerdict semibranch_indep(const MixedStructure& s, const NodeSet& a,
                              const NodeSet& b, const NodeSet& c) {
  if (s.flavor() != Flavor::kSemibranched) {
    throw std::invalid_argument("semibranch independence needs a semibranched structure");
  }
  check_ids(s, a);
  check_ids(s, b);
  check_ids(s, c);
  const NodeSet ac = closure(s, set_union(a, c));
  const NodeSet bc = closure(s, set_union(b, c));
  const NodeSet cc = closure(s, c);
  return tree_clauses(s, ac, bc, cc, true, false);
}

IndepVerdict graph_free_indep(const MixedStructure& s, const NodeSet& a,
                              const NodeSet& b, const NodeSet& c) {
  check_ids(s, a);
  check_ids(s, b);
  check_ids(s, c);
  for (int x : set_intersection(a, b)) {
    if (!set_contains(c, x)) {
      return {false, IndepClause::kGraphIntersection, IndepSide::kGraph, {x}};
    }
  }
  const NodeSet a_out = set_difference(a, c);
  const NodeSet b_out = set_difference(b, c);
  for (int x : a_out) {
    for (int y : b_out) {
      if (s.has_edge(x, y)) {
        return {false, IndepClause::kGraphCrossEdge, IndepSide::kGraph, {x, y}};
      }
    }
  }
  return {};
}

NodeSet relation_closure(const MixedStructure& s, const Relation& rel,
                         const NodeSet& x) {
  switch (rel.kind) {
    case RelationKind::kCone:
    case RelationKind::kMixedCone:
      return cone_closure(s, resolve_gamma(s, rel), x);
    case RelationKind::kSemibranch:
    case RelationKind::kMixedSemibranch:
      if (s.flavor() != Flavor::kSemibranched) {
        throw std::invalid_argument("semibranch relation needs a semibranched structure");
      }
      return closure(s, x);
    case RelationKind::kGraphFree:
      return x;
  }
  return x;
}

IndepVerdict mix_indep(const MixedStructure& s, const Relation& rel,
                       const NodeSet& a, const NodeSet& b, const NodeSet& c) {
  IndepVerdict tree;
  if (rel.kind == RelationKind::kMixedCone) {
    tree = cone_indep(s, resolve_gamma(s, rel), a, b, c);
  } else if (rel.kind == RelationKind::kMixedSemibranch) {
    tree = semibranch_indep(s, a, b, c);
  } else {
    throw std::invalid_argument("mix_indep needs a mixed relation");
  }
  if (!tree.independent) return tree;
  return graph_free_indep(s, relation_closure(s, rel, set_union(a, c)),
                          relation_closure(s, rel, set_union(b, c)),
                          relation_closure(s, rel, c));
}

IndepVerdict independent(const MixedStructure& s, const Relation& rel,
                         const NodeSet& a, const NodeSet& b, const NodeSet& c) {
  switch (rel.kind) {
    case RelationKind::kCone:
      return cone_indep(s, resolve_gamma(s, rel), a, b, c);
    case RelationKind::kSemibranch:
      return semibranch_indep(s, a, b, c);
    case RelationKind::kGraphFree:
      return graph_free_indep(s, a, b, c);
    case RelationKind::kMixedCone:
    case RelationKind::kMixedSemibranch:
      return mix_indep(s, rel, a, b, c);
  }
  return {};
}

bool replay_violation(const MixedStructure& s, const Relation& rel,
                      const NodeSet& a, const NodeSet& b, const NodeSet& c,
                      const IndepVerdict& v) {
  if (v.independent) return false;
  const NodeSet ac = relation_closure(s, rel, set_union(a, c));
  const NodeSet bc = relation_closure(s, rel, set_union(b, c));
  const NodeSet cc = relation_closure(s, rel, c);
  const auto& w = v.witness;
  const bool semi = rel.kind == RelationKind::kSemibranch ||
                    rel.kind == RelationKind::kMixedSemibranch;
  switch (v.clause) {
    case IndepClause::kNone:
      return false;
    case IndepClause::kBetweenness:
      return w.size() == 2 && set_contains(ac, w[0]) && set_contains(bc, w[1]) &&
             betweenness_fails(s, cc, w[0], w[1]);
    case IndepClause::kSeparation:
      return w.size() == 3 && set_contains(ac, w[0]) && set_contains(bc, w[1]) &&
             w[2] == s.meet(w[0], w[1]) &&
             separation_fails(s, cc, w[0], w[1], semi);
    case IndepClause::kGraphIntersection:
      return w.size() == 1 && set_contains(ac, w[0]) && set_contains(bc, w[0]) &&
             !set_contains(cc, w[0]);
    case IndepClause::kGraphCrossEdge:
      return w.size() == 2 && set_contains(ac, w[0]) && !set_contains(cc, w[0]) &&
             set_contains(bc, w[1]) && !set_contains(cc, w[1]) &&
             s.has_edge(w[0], w[1]);
  }
  return false;
}

bool easy_indep_sufficient(const MixedStructure& s, int gamma, const NodeSet& a,
                           const NodeSet& b) {
  if (gamma < 0 || gamma >= s.size()) {
    throw std::invalid_argument("base point out of range");
  }
  for (int x : a) {
    const int xg = s.meet(x, gamma);
    for (int y : b) {
      if (s.leq(gamma, x) && !s.leq(s.meet(x, y), gamma)) return false;
      if (xg != gamma && !s.lt(xg, s.meet(y, gamma))) return false;
    }
  }
  return true;
}

namespace {

PointExtension claim_descriptor(const MixedStructure& s, int a, const NodeSet& cc,
                                const NodeSet& bc, ExtensionCase* which) {
  PointExtension d;
  if (s.relational()) {
    for (int c : cc) {
      if (s.has_edge(a, c)) d.neighbors.push_back(c);
    }
  }
  int c0 = kNone;  // max C below a
  int c1 = kNone;  // min C above a
  for (int c : cc) {
    if (s.lt(c, a) && (c0 == kNone || s.depth(c) > s.depth(c0))) c0 = c;
    if (s.lt(a, c) && (c1 == kNone || s.depth(c) < s.depth(c1))) c1 = c;
  }
  if (c0 == kNone) {
    *which = ExtensionCase::kBelowAll;
    int low = bc.front();
    for (int x : bc) {
      if (s.depth(x) < s.depth(low)) low = x;
    }
    d.kind = ExtensionKind::kBelow;
    d.upper = low;
  } else if (c1 == kNone) {
    *which = ExtensionCase::kAboveAll;
    int e = kNone;
    for (int c : cc) {
      int m = s.meet(a, c);
      if (e == kNone || s.depth(m) > s.depth(e)) e = m;
    }
    d.kind = ExtensionKind::kChild;
    d.lower = e;
  } else {
    *which = ExtensionCase::kBetween;
    int b0 = kNone;
    for (int x : bc) {
      if (s.lt(c0, x) && s.leq(x, c1) &&
          (b0 == kNone || s.depth(x) < s.depth(b0))) {
        b0 = x;
      }
    }
    d.kind = ExtensionKind::kGap;
    d.lower = c0;
    d.upper = b0;
  }
  return d;
}

bool witness_ok(const MixedStructure& s, const Relation& rel, const NodeSet& cc,
                const NodeSet& bc, int a, int y) {
  if (!same_type_over(s, cc, a, y)) return false;
  return independent(s, rel, {y}, bc, cc).independent;
}

}  // namespace

ExtensionWitness extension_witness(Approximation& appr, int a, const NodeSet& c,
                                   const NodeSet& b, const Relation& rel) {
  const MixedStructure& s = appr.current();
  if (a < 0 || a >= s.size()) throw std::invalid_argument("node out of range");
  check_ids(s, b);
  check_ids(s, c);
  if (rel.kind == RelationKind::kGraphFree) {
    throw std::invalid_argument("extension needs a tree relation");
  }
  if (is_cone_kind(rel.kind)) {
    const int g = resolve_gamma(s, rel);
    if (s.flavor() == Flavor::kSemibranched ||
        (s.flavor() == Flavor::kPointed && g != s.point())) {
      throw std::invalid_argument("cone extension needs a plain or pointed approximation at its point");
    }
  } else if (s.flavor() != Flavor::kSemibranched) {
    throw std::invalid_argument("semibranch extension needs a semibranched approximation");
  }
  if (!set_subset(c, b)) throw std::invalid_argument("base must lie inside B");
  const NodeSet cc = relation_closure(s, rel, c);
  const NodeSet bc = relation_closure(s, rel, b);
  if (set_contains(cc, a)) return {a, ExtensionCase::kInBase};
  NodeSet ca = cc;
  ca.push_back(a);
  if (relation_closure(s, rel, make_set(ca)) != make_set(ca)) {
    throw std::invalid_argument("<aC> adds more than a");
  }

  if (is_cone_kind(rel.kind)) {
    ExtensionCase which;
    PointExtension d = claim_descriptor(s, a, cc, bc, &which);
    const int y = appr.realize({bc, d}, true);
    if (!witness_ok(appr.current(), rel, cc, bc, a, y)) {
      throw std::logic_error("extension witness failed its own check");
    }
    return {y, which};
  }

  // Semibranch relations: first one-point extension over <BC> that works,
  // then two-point positions off gap interiors.
  // Edges to the base only, as for a.
  std::optional<NodeSet> want;
  if (s.relational()) {
    want.emplace();
    for (int x : cc) {
      if (s.has_edge(a, x)) want->push_back(x);
    }
  }
  const auto descriptors = enumerate_point_extensions(s, bc, want);
  for (const auto& d : descriptors) {
    if (d.depends_on != kNone) continue;
    const int found = find_realization(s, bc, d);
    if (found != kNone) {
      if (witness_ok(s, rel, cc, bc, a, found)) return {found, ExtensionCase::kSearch};
      continue;
    }
    MixedStructure trial = s;
    const int y = grow_point(trial, bc, d);
    if (witness_ok(trial, rel, cc, bc, a, y)) {
      return {appr.grow(bc, d, true), ExtensionCase::kSearch};
    }
  }
  for (const auto& d : descriptors) {
    if (d.depends_on == kNone) continue;
    const PointExtension& gap = descriptors[d.depends_on];
    MixedStructure trial = s;
    const int e = grow_point(trial, bc, gap);
    PointExtension child = d;
    child.depends_on = kNone;
    child.edge_to_dependency = false;
    child.lower = e;
    child.on_branch = false;
    if (d.edge_to_dependency) child.neighbors = set_union(child.neighbors, {e});
    NodeSet be = set_union(bc, {e});
    const int y = grow_point(trial, be, child);
    if (witness_ok(trial, rel, cc, bc, a, y)) {
      const int e_real = appr.grow(bc, gap, true);
      child.lower = e_real;
      if (d.edge_to_dependency) {
        child.neighbors = set_union(d.neighbors, {e_real});
      }
      return {appr.grow(set_union(bc, {e_real}), child, true), ExtensionCase::kSearch};
    }
  }
  throw std::logic_error("no extension witness among one- and two-point positions");
}

std::vector<int> extension_witness_tuple(Approximation& appr,
                                         const std::vector<int>& a,
                                         const NodeSet& c, const NodeSet& b,
                                         const Relation& rel) {
  const MixedStructure& s0 = appr.current();
  check_ids(s0, a);
  NodeSet dom = relation_closure(s0, rel, c);
  std::map<int, int> phi;
  for (int x : dom) phi[x] = x;
  NodeSet base_b = relation_closure(s0, rel, set_union(b, c));
  for (int x : a) {
    while (!phi.contains(x)) {
      const MixedStructure& s = appr.current();
      NodeSet gen = dom;
      gen.push_back(x);
      NodeSet full = relation_closure(s, rel, make_set(gen));
      int z = kNone;
      std::optional<PointExtension> desc;
      for (int y : full) {
        if (set_contains(dom, y)) continue;
        auto d = describe_point(s, dom, y);
        if (d && (z == kNone || s.depth(y) < s.depth(z))) {
          z = y;
          desc = d;
        }
      }
      if (z == kNone) throw std::logic_error("no single-step element");
      PointExtension moved = *desc;
      if (moved.lower != kNone) moved.lower = phi.at(moved.lower);
      if (moved.upper != kNone) moved.upper = phi.at(moved.upper);
      NodeSet nb;
      for (int v : moved.neighbors) nb.push_back(phi.at(v));
      moved.neighbors = make_set(nb);
      NodeSet img;
      for (auto [k, v] : phi) img.push_back(v);
      img = make_set(img);
      const int copy = appr.realize({img, moved}, true);
      const int w = extension_witness(appr, copy, img, base_b, rel).node;
      phi[z] = w;
      dom = set_union(dom, {z});
      base_b = relation_closure(appr.current(), rel, set_union(base_b, {w}));
    }
  }
  std::vector<int> out;
  for (int x : a) out.push_back(phi.at(x));
  return out;
}

QfTypeCode predict_joint_type(const TypedTuple& left, const TypedTuple& right,
                              int base_len, const Relation& rel) {
  const MixedStructure& sl = left.structure;
  const MixedStructure& sr = right.structure;
  if (sl.flavor() != sr.flavor()) throw std::invalid_argument("flavor mismatch");
  if (base_len < 0 || base_len > static_cast<int>(left.tuple.size()) ||
      base_len > static_cast<int>(right.tuple.size())) {
    throw std::invalid_argument("bad base length");
  }
  check_ids(sl, left.tuple);
  check_ids(sr, right.tuple);
  std::vector<int> pl(left.tuple.begin(), left.tuple.begin() + base_len);
  std::vector<int> pr(right.tuple.begin(), right.tuple.begin() + base_len);
  if (qf_type(sl, pl) != qf_type(sr, pr)) {
    throw std::invalid_argument("the two types disagree on the base");
  }
  const bool with_edges = rel.kind == RelationKind::kGraphFree ||
                          rel.kind == RelationKind::kMixedCone ||
                          rel.kind == RelationKind::kMixedSemibranch;
  MixedStructure tl = with_edges ? sl : tree_reduct(sl);
  MixedStructure tr = with_edges ? sr : tree_reduct(sr);
  tl.set_relational(with_edges);
  tr.set_relational(with_edges);

  const NodeSet cl = closure(tl, make_set(pl));
  const NodeSet al = closure(tl, make_set(left.tuple));
  const NodeSet br = closure(tr, make_set(right.tuple));
  auto match = match_generated(tl, pl, tr, pr);
  Substructure a_sub = induced_substructure(tl, al);
  Substructure b_sub = induced_substructure(tr, br);
  Substructure c_sub = induced_substructure(tl, cl);
  auto local = [](const NodeSet& set, int v) {
    return static_cast<int>(std::lower_bound(set.begin(), set.end(), v) - set.begin());
  };
  std::vector<int> f;
  std::vector<int> g;
  for (int v : cl) {
    f.push_back(local(al, v));
    g.push_back(local(br, match.at(v)));
  }
  AmalgamResult r = with_edges
                        ? amalgamate_mixed(c_sub.structure, a_sub.structure, f,
                                           b_sub.structure, g)
                        : amalgamate_tree(c_sub.structure, a_sub.structure, f,
                                          b_sub.structure, g);
  std::vector<int> joint;
  for (int v : pl) joint.push_back(r.left[local(al, v)]);
  for (size_t i = base_len; i < left.tuple.size(); ++i) {
    joint.push_back(r.left[local(al, left.tuple[i])]);
  }
  for (size_t i = base_len; i < right.tuple.size(); ++i) {
    joint.push_back(r.right[local(br, right.tuple[i])]);
  }
  return qf_type(r.amalgam, joint);
}

}  // namespace treeforge
