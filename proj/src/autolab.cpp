// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "treeforge/autolab.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "treeforge/enumerate.hpp"

namespace treeforge {
namespace {

NodeSet keys(const PartialIso& p) {
  NodeSet out;
  for (auto [x, y] : p) out.push_back(x);
  return out;
}

NodeSet values(const PartialIso& p) {
  NodeSet out;
  for (auto [x, y] : p) out.push_back(y);
  return make_set(std::move(out));
}

PartialIso invert(const PartialIso& p) {
  PartialIso out;
  for (auto [x, y] : p) out[y] = x;
  return out;
}

bool interior(const MixedStructure& s, int x) {
  return s.flavor() == Flavor::kSemibranched && s.in_branch_interior(x);
}

void require_same(const FiniteAutomorphism& f, const FiniteAutomorphism& g) {
  if (!(f.structure == g.structure) || f.perm.size() != g.perm.size()) {
    throw std::invalid_argument("automorphisms of different structures");
  }
}

std::vector<int> sorted_children(const MixedStructure& s, int v) {
  std::vector<int> kids = s.children(v);
  std::sort(kids.begin(), kids.end());
  return kids;
}

bool find_fixed_leaf_path(const MixedStructure& s, const std::vector<int>& perm,
                          int v, std::vector<int>& path) {
  path.push_back(v);
  const auto kids = sorted_children(s, v);
  if (kids.empty()) return true;
  for (int c : kids) {
    if (perm[c] == c && find_fixed_leaf_path(s, perm, c, path)) return true;
  }
  path.pop_back();
  return false;
}

}  // namespace

std::string automorphism_error(const FiniteAutomorphism& a) {
  const int n = a.structure.size();
  if (static_cast<int>(a.perm.size()) != n) return "size";
  std::vector<int> inv(n, kNone);
  for (int v = 0; v < n; ++v) {
    int y = a.perm[v];
    if (y < 0 || y >= n || inv[y] != kNone) return "bijection";
    inv[y] = v;
  }
  auto fwd = is_embedding(a.structure, a.structure, a.perm);
  if (!fwd.ok) return fwd.atom;
  auto back = is_embedding(a.structure, a.structure, inv);
  if (!back.ok) return back.atom;
  return "";
}

FiniteAutomorphism identity_automorphism(const MixedStructure& s) {
  std::vector<int> perm(s.size());
  std::iota(perm.begin(), perm.end(), 0);
  return {s, perm};
}

FiniteAutomorphism compose(const FiniteAutomorphism& f, const FiniteAutomorphism& g) {
  require_same(f, g);
  FiniteAutomorphism out{f.structure, std::vector<int>(f.perm.size())};
  for (size_t x = 0; x < g.perm.size(); ++x) out.perm[x] = f.perm[g.perm[x]];
  return out;
}

FiniteAutomorphism inverse(const FiniteAutomorphism& f) {
  FiniteAutomorphism out{f.structure, std::vector<int>(f.perm.size())};
  for (size_t x = 0; x < f.perm.size(); ++x) out.perm[f.perm[x]] = static_cast<int>(x);
  return out;
}

FiniteAutomorphism power(const FiniteAutomorphism& f, int k) {
  FiniteAutomorphism base = k < 0 ? inverse(f) : f;
  FiniteAutomorphism out = identity_automorphism(f.structure);
  for (int i = 0; i < std::abs(k); ++i) out = compose(base, out);
  return out;
}

long long automorphism_order(const FiniteAutomorphism& f) {
  const int n = static_cast<int>(f.perm.size());
  std::vector<bool> seen(n, false);
  long long order = 1;
  for (int v = 0; v < n; ++v) {
    if (seen[v]) continue;
    long long len = 0;
    for (int x = v; !seen[x]; x = f.perm[x]) {
      seen[x] = true;
      ++len;
    }
    order = std::lcm(order, len);
  }
  return order;
}

std::vector<FiniteAutomorphism> automorphisms_of(const MixedStructure& s) {
  std::vector<FiniteAutomorphism> out;
  for (auto& perm : structure_automorphisms(s)) out.push_back({s, std::move(perm)});
  return out;
}

std::string_view dichotomy_name(DichotomyKind k) {
  return k == DichotomyKind::kFan ? "fan" : "branch-fixed";
}

DichotomyResult fixed_chain_dichotomy(const FiniteAutomorphism& alpha) {
  const std::string err = automorphism_error(alpha);
  if (!err.empty()) throw std::invalid_argument("not an automorphism: " + err);
  const MixedStructure& s = alpha.structure;
  DichotomyResult r;
  std::vector<int> path;
  if (find_fixed_leaf_path(s, alpha.perm, s.root(), path)) {
    r.kind = DichotomyKind::kBranchFixed;
    r.chain = path;
    return r;
  }
  r.kind = DichotomyKind::kFan;
  int v = s.root();
  r.chain.push_back(v);
  for (bool moved = true; moved;) {
    moved = false;
    for (int c : sorted_children(s, v)) {
      if (alpha.perm[c] == c) {
        v = c;
        r.chain.push_back(v);
        moved = true;
        break;
      }
    }
  }
  r.apex = v;
  for (int a = 0; a < s.size(); ++a) {
    if (s.leq(v, a)) r.meets.push_back({a, alpha.perm[a], s.meet(a, alpha.perm[a])});
  }
  return r;
}

bool replay_dichotomy(const FiniteAutomorphism& alpha, const DichotomyResult& r) {
  if (!automorphism_error(alpha).empty()) return false;
  const MixedStructure& s = alpha.structure;
  if (r.chain.empty() || r.chain.front() != s.root()) return false;
  for (size_t i = 0; i < r.chain.size(); ++i) {
    int v = r.chain[i];
    if (v < 0 || v >= s.size() || alpha.perm[v] != v) return false;
    if (i > 0 && s.parent(v) != r.chain[i - 1]) return false;
  }
  const int top = r.chain.back();
  for (int c : s.children(top)) {
    if (alpha.perm[c] == c) return false;  // not maximal
  }
  bool fixed_leaf = false;
  for (int v = 0; v < s.size(); ++v) {
    if (s.children(v).empty() && alpha.perm[v] == v) fixed_leaf = true;
  }
  if (r.kind == DichotomyKind::kBranchFixed) {
    return s.children(top).empty();
  }
  if (fixed_leaf || r.apex != top) return false;
  std::vector<std::array<int, 3>> meets;
  for (int a = 0; a < s.size(); ++a) {
    if (!s.leq(top, a)) continue;
    int m = s.meet(a, alpha.perm[a]);
    if (m != top) return false;
    meets.push_back({a, alpha.perm[a], m});
  }
  return meets == r.meets;
}

FanReport is_fan_above(const FiniteAutomorphism& alpha, int g, int max_power) {
  const MixedStructure& s = alpha.structure;
  if (g < 0 || g >= s.size()) throw std::invalid_argument("node out of range");
  FanReport rep;
  rep.order = automorphism_order(alpha);
  rep.vacuous = true;
  for (int a = 0; a < s.size(); ++a) {
    if (s.lt(g, a)) rep.vacuous = false;
  }
  std::vector<int> pk(s.size());
  std::iota(pk.begin(), pk.end(), 0);
  for (int k = 1; k <= max_power; ++k) {
    for (int& y : pk) y = alpha.perm[y];
    bool fan = true;
    for (int a = 0; a < s.size() && fan; ++a) {
      if (s.leq(g, a) && s.meet(a, pk[a]) != g) fan = false;
    }
    rep.fan.push_back(fan);
  }
  return rep;
}

FanReport is_fan_above(const MixedStructure& s, const PartialIso& alpha, int g,
                       int max_power) {
  FanReport rep;
  rep.order = 0;
  rep.vacuous = true;
  for (int a = 0; a < s.size(); ++a) {
    if (s.lt(g, a)) rep.vacuous = false;
  }
  for (int k = 1; k <= max_power; ++k) {
    bool fan = true;
    for (auto [a, unused] : alpha) {
      if (!s.leq(g, a)) continue;
      int y = a;
      for (int i = 0; i < k && y != kNone; ++i) {
        auto it = alpha.find(y);
        y = it == alpha.end() ? kNone : it->second;
      }
      if (y != kNone && s.meet(a, y) != g) fan = false;
    }
    rep.fan.push_back(fan);
  }
  return rep;
}

// Partial automorphisms

namespace {

bool rule_ok(const MixedStructure& s, const MotionRule& rule, int x, int ax) {
  if (!interior(s, x)) return true;
  int dir = 0;
  if (rule.upper != kNone && s.lt(rule.upper, x)) {
    dir = rule.upper_dir;
  } else if (rule.lower != kNone && s.lt(x, rule.lower)) {
    dir = rule.lower_dir;
  }
  if (dir > 0) return s.lt(x, ax);
  if (dir < 0) return s.lt(ax, x);
  return true;
}

NodePredicate any_node() {
  return [](const MixedStructure&, int) { return true; };
}

}  // namespace

int PartialAutomorphism::at(int x) const {
  auto it = map.find(x);
  return it == map.end() ? kNone : it->second;
}

int PartialAutomorphism::preimage(int y) const {
  for (auto [x, z] : map) {
    if (z == y) return x;
  }
  return kNone;
}

PartialIso PartialAutomorphism::inverse_map() const { return invert(map); }

PartialAutomorphism make_partial_automorphism(const MixedStructure& s,
                                              PartialIso map, MotionRule rule) {
  if (s.flavor() != Flavor::kSemibranched) {
    throw std::invalid_argument("partial automorphisms live on semibranched structures");
  }
  if (!is_partial_iso(s, map)) {
    throw std::invalid_argument("map is not a partial isomorphism");
  }
  auto check_threshold = [&](int t, int dir, const char* which) {
    if (t == kNone) return;
    if (dir != 1 && dir != -1) {
      throw std::invalid_argument(std::string(which) + " direction must be +1 or -1");
    }
    auto it = map.find(t);
    if (it == map.end() || !interior(s, t)) {
      throw std::invalid_argument(std::string(which) +
                                  " threshold must be a mapped interior point");
    }
    const int at = it->second;
    if (dir > 0 ? s.lt(at, t) : s.lt(t, at)) {
      throw std::invalid_argument(std::string(which) +
                                  " threshold moves against its direction");
    }
  };
  check_threshold(rule.upper, rule.upper_dir, "upper");
  check_threshold(rule.lower, rule.lower_dir, "lower");
  for (auto [x, y] : map) {
    if (!rule_ok(s, rule, x, y)) {
      throw std::invalid_argument("map breaks its motion rule at node " +
                                  std::to_string(x));
    }
  }
  return {std::move(map), rule, {}};
}

int realize_transported(Approximation& appr, const PartialIso& phi, int a,
                        const NodeSet& anchors, const NodePredicate& pred) {
  const MixedStructure& s = appr.current();
  if (auto it = phi.find(a); it != phi.end()) {
    if (pred(s, it->second)) return it->second;
    throw std::runtime_error("mapped point violates the constraint");
  }
  const NodeSet dom = keys(phi);
  const NodeSet img = values(phi);
  auto desc = describe_point(s, dom, a);
  if (!desc) throw std::invalid_argument("point adds more than itself to the domain");
  PointExtension t = *desc;
  if (t.lower != kNone) t.lower = phi.at(t.lower);
  if (t.upper != kNone) t.upper = phi.at(t.upper);
  NodeSet nb;
  for (int v : t.neighbors) nb.push_back(phi.at(v));
  t.neighbors = make_set(nb);

  for (int y = 0; y < s.size(); ++y) {
    if (set_contains(img, y)) continue;
    auto d = describe_point(s, img, y);
    if (d && *d == t && pred(s, y)) return y;
  }
  const NodeSet base = closure(s, set_union(img, make_set(anchors)));
  MixedStructure flat = s;
  flat.set_relational(false);
  for (PointExtension ext : enumerate_point_extensions(flat, base)) {
    if (ext.depends_on != kNone || ext.kind == ExtensionKind::kFresh) continue;
    if (ext.kind == ExtensionKind::kChild && ext.on_branch &&
        !s.treat_tip_as_branch()) {
      continue;
    }
    ext.neighbors = t.neighbors;
    MixedStructure sim = s;
    const int y = grow_point(sim, base, ext);
    auto d = describe_point(sim, img, y);
    if (!d || !(*d == t) || !pred(sim, y)) continue;
    return appr.grow(base, ext, true);
  }
  throw std::runtime_error("no realization satisfies the constraints");
}

void extend_map(Approximation& appr, PartialIso& p, int w,
                const std::function<NodePredicate(int)>& pred_for) {
  while (!p.contains(w)) {
    const MixedStructure& s = appr.current();
    if (w < 0 || w >= s.size()) throw std::invalid_argument("node out of range");
    const NodeSet dom = keys(p);
    NodeSet gen = dom;
    gen.push_back(w);
    const NodeSet full = closure(s, make_set(gen));
    int z = kNone;
    for (int c : full) {
      if (set_contains(dom, c) || !describe_point(s, dom, c)) continue;
      if (z == kNone || s.depth(c) < s.depth(z)) z = c;
    }
    if (z == kNone) throw std::logic_error("no single-step extension found");
    p[z] = realize_transported(appr, p, z, {z}, pred_for(z));
  }
}

int alpha_image(Approximation& appr, PartialAutomorphism& alpha, int x) {
  const MotionRule rule = alpha.rule;
  extend_map(appr, alpha.map, x, [rule](int z) -> NodePredicate {
    return [rule, z](const MixedStructure& s, int y) { return rule_ok(s, rule, z, y); };
  });
  return alpha.map.at(x);
}

int alpha_preimage(Approximation& appr, PartialAutomorphism& alpha, int y) {
  const MotionRule rule = alpha.rule;
  PartialIso inv = invert(alpha.map);
  extend_map(appr, inv, y, [rule](int z) -> NodePredicate {
    return [rule, z](const MixedStructure& s, int x) { return rule_ok(s, rule, x, z); };
  });
  alpha.map = invert(inv);
  return inv.at(y);
}

// Saturation

namespace {

int mu_at(Approximation& appr, PartialAutomorphism& al, bool inv, int x) {
  return inv ? alpha_preimage(appr, al, x) : alpha_image(appr, al, x);
}

int mu_pre(Approximation& appr, PartialAutomorphism& al, bool inv, int y) {
  return inv ? alpha_image(appr, al, y) : alpha_preimage(appr, al, y);
}

// A new branch point above (below) every interior point.
int fresh_extreme(Approximation& appr, bool up) {
  const MixedStructure& s = appr.current();
  const int tip = s.tip();
  if (!up) {
    const int r = s.root();
    if (!interior(s, r)) throw std::invalid_argument("branch interior is empty");
    return appr.grow({r}, {ExtensionKind::kBelow, kNone, r, true, {}}, true);
  }
  if (s.treat_tip_as_branch()) {
    return appr.grow({tip}, {ExtensionKind::kChild, tip, kNone, true, {}}, true);
  }
  const int m = s.parent(tip);
  if (m == kNone) throw std::invalid_argument("branch interior is empty");
  return appr.grow(make_set({m, tip}), {ExtensionKind::kGap, m, tip, true, {}}, true);
}

// Increasing points for mu = alpha (inv false) or alpha^-1: a' with the type
// of a over dom(phi) moved by phi, above (below) the bounds and the interior
// projections of img(phi), and mu(a') > a'.
int supply(Approximation& appr, PartialAutomorphism& al, bool inv,
           const PartialIso& phi, int a, const NodeSet& bounds_in, bool up) {
  {
    const MixedStructure& s = appr.current();
    if (!interior(s, a)) throw std::invalid_argument("point is not in the branch interior");
    for (auto [c, d] : phi) {
      const int pc = s.project(c);
      if (!interior(s, pc)) continue;
      if (up ? !s.lt(pc, a) : !s.lt(a, pc)) {
        throw std::invalid_argument("point is not beyond the projections of the domain");
      }
    }
    const int dir = inv ? -(up ? al.rule.upper_dir : al.rule.lower_dir)
                        : (up ? al.rule.upper_dir : al.rule.lower_dir);
    if (dir != 1) throw std::invalid_argument("rule shows no increasing points there");
  }
  NodeSet bounds;
  for (int b : bounds_in) {
    if (b != kNone) bounds.push_back(b);
  }
  for (auto [c, d] : phi) {
    const int pd = appr.current().project(d);
    if (interior(appr.current(), pd)) bounds.push_back(pd);
  }
  bounds = make_set(bounds);
  if (!up) {
    for (int b : bounds) mu_pre(appr, al, inv, b);
  }
  auto pick = [&]() {
    const MixedStructure& s = appr.current();
    const PartialIso m = inv ? invert(al.map) : al.map;
    int best = kNone;
    for (auto [e, me] : m) {
      if (!interior(s, e) || !s.lt(e, me)) continue;
      bool fits = true;
      for (int b : bounds) fits = fits && (up ? s.lt(b, e) : s.lt(me, b));
      if (!fits) continue;
      if (best == kNone || (up ? s.depth(e) < s.depth(best) : s.depth(e) > s.depth(best))) {
        best = e;
      }
    }
    return best;
  };
  int e = pick();
  if (e == kNone) {
    const int x = fresh_extreme(appr, up);
    mu_at(appr, al, inv, x);
    e = pick();
    if (e == kNone) throw std::runtime_error("no increasing point beyond the bounds");
  }
  const int me = mu_at(appr, al, inv, e);
  const int out = realize_transported(
      appr, phi, a, make_set({e, me}),
      [e, me](const MixedStructure& s, int y) { return s.lt(e, y) && s.lt(y, me); });
  const int mo = mu_at(appr, al, inv, out);
  if (!appr.current().lt(out, mo)) throw std::logic_error("saturated point does not increase");
  return out;
}

PartialIso generated_map(const MixedStructure& s, const std::vector<int>& c,
                         const std::vector<int>& d) {
  if (c.size() != d.size()) throw std::invalid_argument("tuples differ in length");
  for (int v : c) {
    if (v < 0 || v >= s.size()) throw std::invalid_argument("node out of range");
  }
  for (int v : d) {
    if (v < 0 || v >= s.size()) throw std::invalid_argument("node out of range");
  }
  if (!(qf_type(s, c) == qf_type(s, d))) {
    throw std::invalid_argument("tuples have different types");
  }
  PartialIso phi = match_generated(s, c, s, d);
  if (s.flavor() == Flavor::kPointed) phi[s.point()] = s.point();
  if (!is_partial_iso(s, phi)) throw std::invalid_argument("tuples generate no isomorphism");
  return phi;
}

}  // namespace

std::string_view saturation_name(SaturationKind k) {
  switch (k) {
    case SaturationKind::kCone: return "cone";
    case SaturationKind::kInterval: return "interval";
    case SaturationKind::kIncreasingUp: return "increasing-up";
    case SaturationKind::kIncreasingDown: return "increasing-down";
  }
  return "?";
}

int realize_saturation(Approximation& appr, const SaturationRequest& req) {
  const MixedStructure& s = appr.current();
  auto in_range = [&](int v) { return v >= 0 && v < s.size(); };
  if (!in_range(req.a)) throw std::invalid_argument("node out of range");
  const PartialIso phi = generated_map(s, req.c, req.d);
  switch (req.kind) {
    case SaturationKind::kCone: {
      if (s.flavor() != Flavor::kPointed) {
        throw std::invalid_argument("cone saturation needs the pointed flavor");
      }
      const int g = s.point();
      if (!in_range(req.b) || !s.lt(g, req.a) || !s.lt(g, req.b)) {
        throw std::invalid_argument("a and b must lie above the point");
      }
      for (int x : req.c) {
        if (s.lt(g, s.meet(x, req.a))) throw std::invalid_argument("a lies in a cone of c");
      }
      for (int x : req.d) {
        if (s.lt(g, s.meet(x, req.b))) throw std::invalid_argument("b lies in a cone of d");
      }
      const int b = req.b;
      const bool above = req.above_b;
      return realize_transported(appr, phi, req.a, {b},
                                 [g, b, above](const MixedStructure& t, int y) {
                                   return t.lt(g, t.meet(y, b)) && (!above || t.lt(b, y));
                                 });
    }
    case SaturationKind::kInterval: {
      if (!in_range(req.b1) || !in_range(req.b2) || !s.lt(req.b1, req.b2)) {
        throw std::invalid_argument("interval bounds must satisfy b1 < b2");
      }
      std::function<int(int)> proj;
      if (s.flavor() == Flavor::kPointed) {
        const int g = s.point();
        for (int v : {req.a, req.b1, req.b2}) {
          if (!s.lt(v, g)) throw std::invalid_argument("interval points must lie below the point");
        }
        proj = [&s, g](int x) { return s.meet(x, g); };
      } else if (s.flavor() == Flavor::kSemibranched) {
        for (int v : {req.a, req.b1, req.b2}) {
          if (!s.in_branch(v)) throw std::invalid_argument("interval points must lie on the branch");
        }
        proj = [&s](int x) { return s.project(x); };
      } else {
        throw std::invalid_argument("interval saturation needs a point or a branch");
      }
      for (size_t i = 0; i < req.c.size(); ++i) {
        const int pc = proj(req.c[i]);
        const int pd = proj(req.d[i]);
        if (s.leq(pd, req.b1) && !s.lt(pc, req.a)) {
          throw std::invalid_argument("a is not above a projection bounded by b1");
        }
        if (s.leq(req.b2, pd) && !s.lt(req.a, pc)) {
          throw std::invalid_argument("a is not below a projection bounding b2");
        }
      }
      const int b1 = req.b1;
      const int b2 = req.b2;
      return realize_transported(appr, phi, req.a, make_set({b1, b2}),
                                 [b1, b2](const MixedStructure& t, int y) {
                                   return t.lt(b1, y) && t.lt(y, b2);
                                 });
    }
    case SaturationKind::kIncreasingUp:
    case SaturationKind::kIncreasingDown: {
      if (s.flavor() != Flavor::kSemibranched || req.alpha == nullptr) {
        throw std::invalid_argument("increasing saturation needs a branch and an automorphism");
      }
      if (req.b != kNone && !interior(s, req.b)) {
        throw std::invalid_argument("bound must lie in the branch interior");
      }
      return supply(appr, *req.alpha, req.use_inverse, phi, req.a, {req.b},
                    req.kind == SaturationKind::kIncreasingUp);
    }
  }
  throw std::logic_error("unknown saturation kind");
}

// Cone permutations

std::vector<int> induced_cone_action(const MixedStructure& s, const PartialIso& p,
                                     int g, const std::vector<int>& reps) {
  auto cone_of = [&](int x) {
    for (size_t i = 0; i < reps.size(); ++i) {
      if (s.lt(g, s.meet(x, reps[i]))) return static_cast<int>(i);
    }
    return -2;
  };
  std::vector<int> action(reps.size(), kNone);
  for (auto [x, y] : p) {
    if (!s.lt(g, x)) continue;
    const int i = cone_of(x);
    if (i < 0) continue;
    const int j = s.lt(g, y) ? cone_of(y) : -2;
    if (action[i] == kNone) {
      action[i] = j;
    } else if (action[i] != j) {
      action[i] = -2;
    }
  }
  return action;
}

ConePermutationResult realize_cone_permutation(Approximation& appr, int g,
                                               const std::vector<int>& sigma,
                                               int steps) {
  const MixedStructure& s0 = appr.current();
  if (g < 0 || g >= s0.size()) throw std::invalid_argument("node out of range");
  ConePermutationResult res;
  res.g = g;
  if (s0.flavor() == Flavor::kSemibranched) {
    if (s0.in_branch(g)) throw std::invalid_argument("g lies on the branch");
    res.declared_fixed = make_set({g, s0.project(g)});
  } else if (s0.flavor() == Flavor::kPointed) {
    if (g != s0.point()) throw std::invalid_argument("g must be the point");
    res.declared_fixed = {g};
  } else {
    throw std::invalid_argument("cone permutation needs a branch or a point");
  }
  for (const auto& cone : cones_at(s0, g)) res.cone_reps.push_back(cone.front());
  {
    std::vector<int> sorted = sigma;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> ident(res.cone_reps.size());
    std::iota(ident.begin(), ident.end(), 0);
    if (sorted != ident) {
      throw std::invalid_argument("sigma is not a permutation of the cones at g");
    }
  }
  res.sigma = sigma;
  for (int f : res.declared_fixed) res.map[f] = f;

  auto cone_of = [&](int x) {
    const MixedStructure& s = appr.current();
    if (!s.lt(g, x)) return kNone;
    for (size_t i = 0; i < res.cone_reps.size(); ++i) {
      if (s.lt(g, s.meet(x, res.cone_reps[i]))) return static_cast<int>(i);
    }
    res.cone_reps.push_back(x);  // a cone born during the construction
    res.sigma.push_back(static_cast<int>(res.sigma.size()));
    return static_cast<int>(res.cone_reps.size()) - 1;
  };
  const auto no_new_fixed = [](int z) -> NodePredicate {
    return [z](const MixedStructure&, int y) { return y != z; };
  };
  auto add = [&](PartialIso& p, int w, bool backward) {
    if (p.contains(w)) return;
    const int ci = cone_of(w);
    bool known = ci == kNone;
    for (auto [x, y] : p) {
      if (!known && cone_of(x) == ci) known = true;
    }
    if (known) {
      extend_map(appr, p, w, no_new_fixed);
      return;
    }
    int target = res.sigma[ci];
    if (backward) {
      target = static_cast<int>(std::find(res.sigma.begin(), res.sigma.end(), ci) -
                                res.sigma.begin());
    }
    const int rep = res.cone_reps[target];
    NodePredicate pred;
    if (target == ci) {
      pred = [w](const MixedStructure& s, int y) { return s.lt(w, y); };
    } else {
      pred = [g, rep](const MixedStructure& s, int y) { return s.lt(g, s.meet(y, rep)); };
    }
    p[w] = realize_transported(appr, p, w, {target == ci ? w : rep}, pred);
  };

  for (int k = 0; k < steps && k < appr.current().size(); ++k) {
    add(res.map, k, false);
    PartialIso inv = invert(res.map);
    add(inv, k, true);
    res.map = invert(inv);

    const MixedStructure& s = appr.current();
    StageCertificate cert;
    cert.stage = k + 1;
    cert.invariant = "action";
    cert.domain = keys(res.map);
    cert.image = values(res.map);
    cert.required = {k};
    std::ostringstream why;
    bool ok = is_partial_iso(s, res.map);
    if (!ok) why << "not a partial isomorphism; ";
    for (auto [x, y] : res.map) {
      const int cx = cone_of(x);
      const int cy = cone_of(y);
      if ((cx == kNone) != (cy == kNone) || (cx != kNone && res.sigma[cx] != cy)) {
        ok = false;
        why << "cone action differs at " << x << "; ";
      }
    }
    NodeSet fixed;
    for (auto [x, y] : res.map) {
      if (x == y) fixed.push_back(x);
    }
    if (fixed != res.declared_fixed) {
      ok = false;
      why << "fixed points differ; ";
    }
    cert.ok = ok;
    cert.detail = why.str();
    res.stages.push_back(std::move(cert));
  }
  return res;
}

// Conjugate products

FanComposition compose_and_check_fan(const FiniteAutomorphism& alpha,
                                     const std::vector<Conjugator>& conj, int g,
                                     int max_power) {
  const std::string err = automorphism_error(alpha);
  if (!err.empty()) throw std::invalid_argument("not an automorphism: " + err);
  FanComposition out;
  out.product = identity_automorphism(alpha.structure);
  for (const auto& cj : conj) {
    require_same(alpha, cj.beta);
    if (!automorphism_error(cj.beta).empty()) {
      throw std::invalid_argument("conjugator is not an automorphism");
    }
    const FiniteAutomorphism f = power(alpha, cj.sign);
    out.product = compose(out.product, compose(inverse(cj.beta), compose(f, cj.beta)));
  }
  const MixedStructure& s = alpha.structure;
  const auto cones = cones_at(s, g);
  for (const auto& cone : cones) {
    out.cone_action.push_back(out.product.perm[g] == g
                                  ? cone_index(s, g, out.product.perm[cone.front()])
                                  : kNone);
  }
  out.fan = is_fan_above(out.product, g, max_power);
  return out;
}

PartialIso compose_partial(const PartialIso& alpha,
                           const std::vector<PartialConjugator>& conj) {
  const PartialIso alpha_inv = invert(alpha);
  auto apply = [](const PartialIso& m, int x) {
    auto it = m.find(x);
    return it == m.end() ? kNone : it->second;
  };
  std::set<int> candidates;
  for (auto [x, y] : alpha) candidates.insert(x);
  for (const auto& cj : conj) {
    for (auto [x, y] : cj.beta) candidates.insert(x);
  }
  PartialIso out;
  for (int x0 : candidates) {
    int x = x0;
    for (auto it = conj.rbegin(); it != conj.rend() && x != kNone; ++it) {
      const PartialIso beta_inv = invert(it->beta);
      x = apply(it->beta, x);
      const PartialIso& f = it->sign < 0 ? alpha_inv : alpha;
      for (int i = 0; i < std::abs(it->sign) && x != kNone; ++i) x = apply(f, x);
      if (x != kNone) x = apply(beta_inv, x);
    }
    if (x != kNone) out[x0] = x;
  }
  return out;
}

// Staged commutator constructions

std::string_view recipe_name(Recipe r) {
  switch (r) {
    case Recipe::kC1: return "c1";
    case Recipe::kC2: return "c2";
    case Recipe::kC3: return "c3";
  }
  return "?";
}

Recipe parse_recipe(std::string_view name) {
  if (name == "c1" || name == "C1") return Recipe::kC1;
  if (name == "c2" || name == "C2") return Recipe::kC2;
  if (name == "c3" || name == "C3") return Recipe::kC3;
  throw std::invalid_argument("unknown recipe: " + std::string(name));
}

namespace {

struct WordEval {
  PartialIso a, ai, b, bi;
  WordEval(const PartialIso& alpha, const PartialIso& beta)
      : a(alpha), ai(invert(alpha)), b(beta), bi(invert(beta)) {}

  int operator()(const Term& t) const {
    int x = t.node;
    for (auto it = t.word.rbegin(); it != t.word.rend() && x != kNone; ++it) {
      const PartialIso* m = nullptr;
      switch (*it) {
        case 'a': m = &a; break;
        case 'A': m = &ai; break;
        case 'b': m = &b; break;
        case 'B': m = &bi; break;
        default: return kNone;
      }
      auto f = m->find(x);
      x = f == m->end() ? kNone : f->second;
    }
    return x;
  }
};

int extreme_interior(const MixedStructure& s, const NodeSet& xs, bool top) {
  int best = kNone;
  for (int x : xs) {
    if (!interior(s, x)) continue;
    if (best == kNone || (top ? s.lt(best, x) : s.lt(x, best))) best = x;
  }
  return best;
}

PartialIso with(PartialIso p, int x, int y) {
  p[x] = y;
  return p;
}

class StagedBuilder {
 public:
  StagedBuilder(Approximation& appr, StagedBuildResult& r, int up, int down)
      : appr_(appr), r_(r), up_(up), down_(down) {
    const MixedStructure& s = appr_.current();
    r_.branch = s.treat_tip_as_branch();
    if (!r_.branch) gamma_ = s.tip();
  }

  void run(int stages) {
    stage_zero();
    for (int n = 1; n <= stages; ++n) {
      try {
        if (n == 1) {
          stage_one();
        } else {
          stage_next(n - 1);
        }
      } catch (const std::runtime_error& e) {
        throw std::runtime_error("stage " + std::to_string(n) + ": " + e.what());
      }
      r_.stages = n;
      certify(n);
    }
  }

  void evaluate(const std::vector<int>& window) {
    if (r_.recipe == Recipe::kC2) {
      const int n = r_.stages;
      for (auto* seq : {&r_.a, &r_.a_prime}) {
        const bool upward = seq == &r_.a;
        for (int k = 0; k + 1 < n; ++k) {
          const int x = seq->at(k);
          const int y = product(x);
          r_.product_values.push_back({x, y});
          const bool ok = upward ? s().lt(x, y) : s().lt(y, x);
          if (!ok || y != seq->at(k + 1)) r_.product_increasing = false;
        }
      }
      for (int x : window) {
        if (!r_.beta.contains(x)) r_.window_uncovered.push_back(x);
      }
      r_.window_uncovered = make_set(r_.window_uncovered);
      return;
    }
    for (int x : window) {
      if (!r_.beta.contains(x) || r_.stages == 0) {
        r_.window_uncovered.push_back(x);
        continue;
      }
      const int y = product(x);
      r_.product_values.push_back({x, y});
      if (!s().lt(x, y)) r_.product_increasing = false;
    }
    r_.window_uncovered = make_set(r_.window_uncovered);
  }

 private:
  const MixedStructure& s() const { return appr_.current(); }
  int A(int x) { return alpha_image(appr_, r_.alpha, x); }
  int Ai(int y) { return alpha_preimage(appr_, r_.alpha, y); }
  int pi(int x) const { return s().project(x); }

  int beta_pre(int y) {
    PartialIso inv = invert(r_.beta);
    extend_map(appr_, inv, y, [](int) { return any_node(); });
    r_.beta = invert(inv);
    return inv.at(y);
  }

  int product(int x) {
    const int y1 = r_.beta.at(x);
    const int y2 = A(y1);
    const int y3 = beta_pre(y2);
    return r_.recipe == Recipe::kC3 ? Ai(y3) : A(y3);
  }

  std::vector<int> w_list() {
    std::vector<int> out;
    const MixedStructure& t = s();
    for (int v = 0; v < t.size(); ++v) {
      if (interior(t, t.project(v))) out.push_back(v);
    }
    if (first_w_ != kNone) {
      std::erase(out, first_w_);
      out.insert(out.begin(), first_w_);
    }
    return out;
  }

  std::vector<int> v_list() {
    std::vector<int> out;
    if (r_.branch) return out;
    for (int v = 0; v < s().size(); ++v) {
      if (s().leq(gamma_, v)) out.push_back(v);
    }
    return out;
  }

  void add_beta(int w) {
    extend_map(appr_, r_.beta, w, [](int) { return any_node(); });
    beta_pre(w);
  }

  // Puts v in the domain and the image with beta keeping every cone above
  // the branch top.
  void add_v(int v) {
    if (r_.beta.contains(v) && values(r_.beta) == make_set(values(r_.beta)) &&
        set_contains(values(r_.beta), v)) {
      return;
    }
    bool met = !s().lt(gamma_, v);
    for (auto [x, y] : r_.beta) {
      if (!met && s().lt(gamma_, s().meet(x, v))) met = true;
    }
    if (met || r_.beta.contains(v)) {
      add_beta(v);
      return;
    }
    const int g = gamma_;
    r_.beta[v] = realize_transported(
        appr_, r_.beta, v, {v},
        [g, v](const MixedStructure& t, int y) { return t.lt(g, t.meet(y, v)); });
    beta_pre(v);
  }

  void cover(int k) {
    const auto ws = w_list();
    if (k < static_cast<int>(ws.size())) {
      add_beta(ws[k]);
      required_.push_back(ws[k]);
      r_.w_order.push_back(ws[k]);
    }
    if (!r_.branch) {
      const auto vs = v_list();
      if (k < static_cast<int>(vs.size())) {
        add_v(vs[k]);
        required_.push_back(vs[k]);
        r_.v_order.push_back(vs[k]);
      }
    }
  }

  int bound_for(int k) {
    const auto ws = w_list();
    return k < static_cast<int>(ws.size()) ? pi(ws[k]) : kNone;
  }

  int increasing_point(int dir, int below = kNone) {
    for (auto [x, y] : r_.alpha.map) {
      if (!interior(s(), x)) continue;
      if (below != kNone && !s().lt(x, below)) continue;
      if (dir > 0 ? s().lt(x, y) : s().lt(y, x)) return x;
    }
    return kNone;
  }

  void stage_zero() {
    r_.beta.clear();
    if (!r_.branch) r_.beta[gamma_] = gamma_;
    if (r_.recipe == Recipe::kC3) {
      A(up_);
      A(down_);
      const auto ws = w_list();
      for (int w : ws) {
        if (s().lt(up_, pi(w))) {
          first_w_ = w;
          break;
        }
      }
      if (first_w_ == kNone) first_w_ = A(up_);
    }
    certify(0);
  }

  void stage_one() {
    PartialAutomorphism& al = r_.alpha;
    if (r_.recipe == Recipe::kC1) {
      const int a0 = increasing_point(1);
      const int pb = bound_for(0);
      const int b = supply(appr_, al, false, r_.beta, a0, {pb}, true);
      const PartialIso p1 = with(r_.beta, a0, b);
      const int ab = A(b);
      const int c1 = supply(appr_, al, false, invert(p1), ab, {pb}, true);
      const PartialIso p2 = with(p1, c1, ab);
      const int x3 = Ai(a0);
      const int bp = supply(appr_, al, false, p2, x3, {}, false);
      const PartialIso p3 = with(p2, x3, bp);
      const int aibp = Ai(bp);
      const int am1 = supply(appr_, al, false, invert(p3), aibp, {}, false);
      r_.beta = with(p3, am1, aibp);
      r_.a[0] = a0;
      r_.a[-1] = am1;
      r_.c[1] = c1;
      cover(0);
    } else if (r_.recipe == Recipe::kC2) {
      int a0 = kNone;
      int ap0 = kNone;
      for (auto [x, y] : al.map) {
        if (!interior(s(), x) || !s().lt(x, y)) continue;
        ap0 = increasing_point(-1, x);
        if (ap0 != kNone) {
          a0 = x;
          break;
        }
      }
      const int pb = bound_for(0);
      const int b = supply(appr_, al, false, r_.beta, a0, {pb}, true);
      const PartialIso p1 = with(r_.beta, a0, b);
      const int ab = A(b);
      const int c1 = supply(appr_, al, false, invert(p1), ab, {pb}, true);
      const PartialIso p2 = with(p1, c1, ab);
      const int bp = supply(appr_, al, true, p2, ap0, {pb}, false);
      const PartialIso p3 = with(p2, ap0, bp);
      const int abp = A(bp);
      const int cp1 = supply(appr_, al, true, invert(p3), abp, {pb}, false);
      r_.beta = with(p3, cp1, abp);
      r_.a[0] = a0;
      r_.a_prime[0] = ap0;
      r_.c[1] = c1;
      r_.c_prime[1] = cp1;
      cover(0);
    } else {
      int a0 = kNone;
      for (int v = 0; v < s().size() && a0 == kNone; ++v) {
        if (interior(s(), v) && s().lt(v, down_) && !r_.beta.contains(v)) a0 = v;
      }
      if (a0 == kNone) a0 = fresh_extreme(appr_, false);
      const int aa0 = A(a0);
      const int up = up_;
      const int b = realize_transported(
          appr_, r_.beta, a0, {up},
          [up](const MixedStructure& t, int y) { return t.lt(up, y); });
      const PartialIso p1 = with(r_.beta, a0, b);
      const int aap = A(down_);
      const int bp = realize_transported(
          appr_, p1, aa0, {aap},
          [aap](const MixedStructure& t, int y) { return t.lt(y, aap); });
      const PartialIso p2 = with(p1, aa0, bp);
      const int ab = A(b);
      const int aa = A(up_);
      const int c1 = realize_transported(
          appr_, invert(p2), ab, {aa},
          [aa](const MixedStructure& t, int y) { return t.lt(aa, y); });
      const PartialIso p3 = with(p2, c1, ab);
      const int aibp = Ai(bp);
      const int am1 = realize_transported(appr_, invert(p3), aibp, {}, any_node());
      r_.beta = with(p3, am1, aibp);
      r_.a[0] = a0;
      r_.a[-1] = am1;
      r_.c[1] = c1;
      // l(1) = 0: no w yet; the first v still goes in.
      if (!r_.branch) {
        const auto vs = v_list();
        add_v(vs[0]);
        required_v_.push_back(vs[0]);
        r_.v_order.push_back(vs[0]);
      }
    }
  }

  // Builds stage n + 1 from stage n >= 1.
  void stage_next(int n) {
    PartialAutomorphism& al = r_.alpha;
    if (r_.recipe == Recipe::kC1) {
      const int an = A(r_.c.at(n));
      r_.a[n] = an;
      const int pb = bound_for(n);
      const int b = supply(appr_, al, false, r_.beta, an, {pb}, true);
      const PartialIso p1 = with(r_.beta, an, b);
      const int ab = A(b);
      const int cn1 = supply(appr_, al, false, invert(p1), ab, {pb}, true);
      const PartialIso p2 = with(p1, cn1, ab);
      const int x3 = Ai(r_.a.at(-n));
      const int bp = supply(appr_, al, false, p2, x3, {}, false);
      const PartialIso p3 = with(p2, x3, bp);
      const int aibp = Ai(bp);
      const int am = supply(appr_, al, false, invert(p3), aibp, {}, false);
      r_.beta = with(p3, am, aibp);
      r_.a[-n - 1] = am;
      r_.c[n + 1] = cn1;
      cover(n);
    } else if (r_.recipe == Recipe::kC2) {
      const int an = A(r_.c.at(n));
      const int apn = A(r_.c_prime.at(n));
      r_.a[n] = an;
      r_.a_prime[n] = apn;
      const int pb = bound_for(n);
      const int b = supply(appr_, al, false, r_.beta, an, {pb}, true);
      const PartialIso p1 = with(r_.beta, an, b);
      const int ab = A(b);
      const int cn1 = supply(appr_, al, false, invert(p1), ab, {pb}, true);
      const PartialIso p2 = with(p1, cn1, ab);
      const int bp = supply(appr_, al, true, p2, apn, {pb}, false);
      const PartialIso p3 = with(p2, apn, bp);
      const int abp = A(bp);
      const int cpn1 = supply(appr_, al, true, invert(p3), abp, {pb}, false);
      r_.beta = with(p3, cpn1, abp);
      r_.c[n + 1] = cn1;
      r_.c_prime[n + 1] = cpn1;
      cover(n);
    } else {
      const int an = Ai(r_.c.at(n));
      r_.a[n] = an;
      const int b = realize_transported(appr_, r_.beta, an, {}, any_node());
      const PartialIso p1 = with(r_.beta, an, b);
      const int ab = A(b);
      const int aaan = A(A(an));
      const int cn1 = realize_transported(
          appr_, invert(p1), ab, {aaan},
          [aaan](const MixedStructure& t, int y) { return t.lt(aaan, y); });
      const PartialIso p2 = with(p1, cn1, ab);
      const int bound = A(r_.beta.at(A(r_.a.at(-n + 1))));
      const int aamn = A(r_.a.at(-n));
      const int bp = realize_transported(
          appr_, p2, aamn, {bound},
          [bound](const MixedStructure& t, int y) { return t.lt(y, bound); });
      const PartialIso p3 = with(p2, aamn, bp);
      const int aibp = Ai(bp);
      const int am = realize_transported(appr_, invert(p3), aibp, {}, any_node());
      r_.beta = with(p3, am, aibp);
      r_.a[-n - 1] = am;
      r_.c[n + 1] = cn1;
      const int l = ell(n + 1);
      for (int k = 0; k < l; ++k) {
        const auto ws = w_list();
        if (!r_.beta.contains(ws[k]) || !set_contains(values(r_.beta), ws[k])) {
          add_beta(ws[k]);
        }
        if (std::find(r_.w_order.begin(), r_.w_order.end(), ws[k]) == r_.w_order.end()) {
          r_.w_order.push_back(ws[k]);
          required_.push_back(ws[k]);
        }
        if (!r_.branch) {
          const auto vs = v_list();
          if (k < static_cast<int>(vs.size()) &&
              std::find(r_.v_order.begin(), r_.v_order.end(), vs[k]) == r_.v_order.end()) {
            add_v(vs[k]);
            r_.v_order.push_back(vs[k]);
            required_.push_back(vs[k]);
          }
        }
      }
    }
  }

  // First W index whose projection leaves the orbit window of stage n; all of
  // W when none does.
  int ell(int n) {
    const int m = (n - 1) / 2;
    int hi = up_;
    int lo = down_;
    for (int i = 0; i < m; ++i) {
      hi = A(hi);
      lo = A(lo);
    }
    const auto ws = w_list();
    for (size_t k = 0; k < ws.size(); ++k) {
      const int p = pi(ws[k]);
      if (s().leq(p, lo) || s().leq(hi, p)) return static_cast<int>(k);
    }
    return static_cast<int>(ws.size());
  }

  static Term t(int node, std::string word = "") { return {node, std::move(word)}; }

  StageCertificate cert(int n, std::string inv) {
    StageCertificate c;
    c.stage = n;
    c.invariant = std::move(inv);
    c.domain = keys(r_.beta);
    c.image = values(r_.beta);
    return c;
  }

  void push(StageCertificate c) {
    c.ok = replay_certificate(s(), r_, c);
    const bool ok = c.ok;
    const std::string name = c.invariant;
    const int stage = c.stage;
    r_.certificates.push_back(std::move(c));
    if (!ok) {
      throw std::runtime_error("stage " + std::to_string(stage) + ": invariant (" + name +
                               ") failed");
    }
  }

  void certify(int n) {
    auto ci = cert(n, "i");
    ci.required = make_set(set_union(make_set(required_), make_set(required_v_)));
    push(std::move(ci));
    if (n >= 1) {
      auto cii = cert(n, "ii");
      auto ciii = cert(n, "iii");
      auto civ = cert(n, "iv");
      const auto& a = r_.a;
      if (r_.recipe == Recipe::kC1) {
        for (int k = -n + 1; k < n; ++k) {
          cii.checks.push_back({t(a.at(k - 1), "ab"), '=', t(a.at(k), "bA")});
        }
        for (int k = -n; k < n; ++k) {
          A(a.at(k));
          ciii.checks.push_back({t(a.at(k)), '<', t(a.at(k), "a")});
        }
        const int cn = r_.c.at(n);
        A(cn);
        ciii.checks.push_back({t(cn), '<', t(cn, "a")});
        ciii.checks.push_back({t(cn), '=', t(a.at(n - 1), "Bab")});
        civ.checks.push_back({t(a.at(-n)), 'm', {}});
        civ.checks.push_back({t(cn), 'M', {}});
      } else if (r_.recipe == Recipe::kC2) {
        const auto& ap = r_.a_prime;
        for (int k = 1; k < n; ++k) {
          cii.checks.push_back({t(a.at(k - 1), "ab"), '=', t(a.at(k), "bA")});
          cii.checks.push_back({t(ap.at(k - 1), "ab"), '=', t(ap.at(k), "bA")});
        }
        for (int k = 0; k < n; ++k) {
          A(a.at(k));
          A(ap.at(k));
          ciii.checks.push_back({t(a.at(k)), '<', t(a.at(k), "a")});
          ciii.checks.push_back({t(ap.at(k), "a"), '<', t(ap.at(k))});
        }
        const int cn = r_.c.at(n);
        const int cpn = r_.c_prime.at(n);
        A(cn);
        A(cpn);
        ciii.checks.push_back({t(cn), '<', t(cn, "a")});
        ciii.checks.push_back({t(cpn, "a"), '<', t(cpn)});
        ciii.checks.push_back({t(cn), '=', t(a.at(n - 1), "Bab")});
        ciii.checks.push_back({t(cpn), '=', t(ap.at(n - 1), "Bab")});
        civ.checks.push_back({t(cpn), 'm', {}});
        civ.checks.push_back({t(cn), 'M', {}});
      } else {
        for (int j = 0, hi = up_, lo = down_; j <= n + 1; ++j) {
          hi = A(hi);
          lo = A(lo);
        }
        for (int k = -n + 1; k < n; ++k) {
          cii.checks.push_back({t(a.at(k - 1), "ab"), '=', t(a.at(k), "ba")});
        }
        const int c1 = r_.c.at(1);
        Ai(c1);
        ciii.checks.push_back({t(up_), '<', t(c1, "A")});
        ciii.checks.push_back({t(down_), '<', t(up_)});
        ciii.checks.push_back({t(a.at(0)), '<', t(down_)});
        ciii.checks.push_back({t(up_), '<', t(a.at(0), "b")});
        ciii.checks.push_back({t(a.at(-1), "b"), '<', t(down_)});
        for (int k = 1; k < n; ++k) {
          ciii.checks.push_back({t(up_, std::string(k - 1, 'a')), '<', t(a.at(k))});
        }
        for (int k = 0; k < n; ++k) {
          ciii.checks.push_back({t(up_, std::string(k / 2, 'a')), '<', t(a.at(k), "b")});
        }
        for (int k = -n; k <= 0; ++k) {
          ciii.checks.push_back({t(a.at(k)), '<', t(down_, std::string(-k / 2, 'a'))});
        }
        for (int k = -n; k < 0; ++k) {
          ciii.checks.push_back({t(a.at(k), "b"), '<', t(down_, std::string(-k - 1, 'a'))});
        }
        const int cn = r_.c.at(n);
        A(A(a.at(n - 1)));
        A(a.at(-n + 1));
        civ.checks.push_back({t(a.at(-n + 1), "a"), 'm', {}});
        civ.checks.push_back({t(cn), 'M', {}});
        civ.checks.push_back({t(a.at(n - 1), "aa"), '<', t(cn)});
        civ.checks.push_back({t(up_, "a"), '<', t(cn)});
      }
      if (!cii.checks.empty()) push(std::move(cii));
      push(std::move(ciii));
      push(std::move(civ));
    }
    if (!r_.branch) {
      auto cv = cert(n, "v");
      cv.checks.push_back({t(gamma_), '=', t(gamma_, "b")});
      for (auto [x, y] : r_.beta) {
        if (s().lt(gamma_, x)) cv.checks.push_back({t(x), '~', t(x, "b")});
      }
      push(std::move(cv));
    }
  }

  Approximation& appr_;
  StagedBuildResult& r_;
  int up_ = kNone;
  int down_ = kNone;
  int gamma_ = kNone;
  int first_w_ = kNone;
  std::vector<int> required_;
  std::vector<int> required_v_;
};

}  // namespace

bool replay_certificate(const MixedStructure& s, const StagedBuildResult& r,
                        const StageCertificate& cert) {
  const WordEval eval(r.alpha.map, r.beta);
  const int gamma = r.branch ? kNone : s.tip();
  if (cert.invariant == "i") {
    if (!is_closed(s, cert.domain) || !is_closed(s, cert.image)) return false;
    std::vector<int> dom;
    std::vector<int> img;
    for (int x : cert.domain) {
      auto it = r.beta.find(x);
      if (it == r.beta.end()) return false;
      dom.push_back(x);
      img.push_back(it->second);
    }
    if (make_set(img) != cert.image) return false;
    if (!(qf_type(s, dom) == qf_type(s, img))) return false;
    for (int w : cert.required) {
      if (!set_contains(cert.domain, w) || !set_contains(cert.image, w)) return false;
    }
  }
  for (const auto& chk : cert.checks) {
    const int l = eval(chk.lhs);
    if (l == kNone) return false;
    if (chk.op == 'm' || chk.op == 'M') {
      if (l != extreme_interior(s, cert.domain, chk.op == 'M')) return false;
      continue;
    }
    const int rv = eval(chk.rhs);
    if (rv == kNone) return false;
    bool ok = false;
    switch (chk.op) {
      case '<': ok = s.lt(l, rv); break;
      case '>': ok = s.lt(rv, l); break;
      case '=': ok = l == rv; break;
      case '~':
        ok = gamma != kNone && s.lt(gamma, l) && s.lt(gamma, rv) &&
             s.lt(gamma, s.meet(l, rv));
        break;
      default: ok = false;
    }
    if (!ok) return false;
  }
  return true;
}

StagedBuildResult staged_commutator_builder(Approximation& appr, Recipe recipe,
                                            PartialAutomorphism alpha, int stages,
                                            const std::vector<int>& window,
                                            int orbit_up, int orbit_down) {
  const MixedStructure& s = appr.current();
  if (s.flavor() != Flavor::kSemibranched) {
    throw std::invalid_argument("staged constructions need a semibranch");
  }
  if (stages < 0) throw std::invalid_argument("stage count must be nonnegative");
  if (!is_partial_iso(s, alpha.map)) {
    throw std::invalid_argument("alpha is not a partial isomorphism");
  }
  for (auto [x, y] : alpha.map) {
    if (!rule_ok(s, alpha.rule, x, y)) {
      throw std::invalid_argument("alpha breaks its motion rule");
    }
  }
  for (int x : window) {
    if (x < 0 || x >= s.size() || !interior(s, x)) {
      throw std::invalid_argument("window point outside the branch interior");
    }
  }
  if (!s.treat_tip_as_branch()) {
    const int g = s.tip();
    if (alpha.at(g) != g) throw std::invalid_argument("alpha must fix the top of the semibranch");
    if (s.parent(g) == kNone) throw std::invalid_argument("branch interior is empty");
  }
  const MotionRule& rule = alpha.rule;
  auto has_point = [&](int dir) {
    for (auto [x, y] : alpha.map) {
      if (interior(s, x) && (dir > 0 ? s.lt(x, y) : s.lt(y, x))) return true;
    }
    return false;
  };
  switch (recipe) {
    case Recipe::kC1:
      if (rule.upper_dir != 1 || rule.lower_dir != 1 || !has_point(1)) {
        throw std::invalid_argument("alpha shows no increasing points at both ends");
      }
      break;
    case Recipe::kC2: {
      if (rule.upper_dir != 1 || rule.lower_dir != -1) {
        throw std::invalid_argument("alpha is not increasing above and decreasing below");
      }
      bool pair = false;
      for (auto [x, y] : alpha.map) {
        if (!interior(s, x) || !s.lt(x, y)) continue;
        for (auto [u, v] : alpha.map) {
          if (interior(s, u) && s.lt(v, u) && s.lt(u, x)) pair = true;
        }
      }
      if (!pair) {
        throw std::invalid_argument("no decreasing point below an increasing one");
      }
      break;
    }
    case Recipe::kC3: {
      const int a = orbit_up;
      const int ap = orbit_down;
      if (a == kNone || ap == kNone || !alpha.map.contains(a) || !alpha.map.contains(ap) ||
          !interior(s, a) || !interior(s, ap)) {
        throw std::invalid_argument("escape orbits must start at mapped interior points");
      }
      if (!s.lt(a, alpha.at(a)) || !s.lt(alpha.at(ap), ap) || !s.lt(ap, a)) {
        throw std::invalid_argument("orbits do not escape upward and downward");
      }
      if (rule.upper_dir != 1 || rule.upper == kNone || !s.leq(rule.upper, a) ||
          rule.lower_dir != -1 || rule.lower == kNone || !s.leq(ap, rule.lower)) {
        throw std::invalid_argument("rule does not carry the orbits to the ends");
      }
      break;
    }
  }
  StagedBuildResult r;
  r.recipe = recipe;
  r.alpha = std::move(alpha);
  StagedBuilder builder(appr, r, orbit_up, orbit_down);
  builder.run(stages);
  builder.evaluate(window);
  return r;
}

// Alpha-orderings

std::vector<OrderCheck> check_alpha_order(const MixedStructure& s,
                                          const PartialIso& alpha,
                                          const std::vector<int>& x, int g) {
  const int n = static_cast<int>(x.size());
  auto same_cone = [&](int u, int v) { return s.lt(g, s.meet(u, v)); };
  int n0 = n;
  for (int i = 0; i < n; ++i) {
    if (s.lt(g, x[i])) {
      n0 = i;
      break;
    }
  }
  OrderCheck c1{"i", true, {}};
  for (int i = 0; i + 1 < n && c1.ok; ++i) {
    if (!s.leq(s.meet(x[i], g), s.meet(x[i + 1], g))) c1 = {"i", false, {i, i + 1}};
  }
  OrderCheck c2{"ii", true, {}};
  for (int i = n0; i < n && c2.ok; ++i) {
    for (int j = i + 1; j < n && c2.ok; ++j) {
      if (same_cone(x[i], x[j]) && !same_cone(x[i + 1], x[j])) c2 = {"ii", false, {i, j}};
    }
  }
  OrderCheck c3{"iii", true, {}};
  for (int j = n0; j < n && c3.ok; ++j) {
    auto it = alpha.find(x[j]);
    if (it == alpha.end()) {
      c3 = {"iii", false, {j}};
      break;
    }
    for (int i = 0; i <= j && c3.ok; ++i) {
      if (!s.leq(s.meet(x[i], it->second), g)) c3 = {"iii", false, {i, j}};
    }
  }
  OrderCheck c4{"refine", true, {}};
  NodeSet prefix;
  for (int i = 0; i < n && c4.ok; ++i) {
    const NodeSet before = cone_closure(s, g, prefix);
    prefix.push_back(x[i]);
    prefix = make_set(prefix);
    const NodeSet after = cone_closure(s, g, prefix);
    if (after != set_union(before, {x[i]})) c4 = {"refine", false, {i}};
  }
  return {c1, c2, c3, c4};
}

AlphaOrderResult alpha_order(const MixedStructure& s, const PartialIso& alpha,
                             const std::vector<int>& tuple, int g) {
  if (g < 0 || g >= s.size()) throw std::invalid_argument("node out of range");
  auto image = [&](int x) {
    auto it = alpha.find(x);
    if (it == alpha.end()) throw std::invalid_argument("alpha undefined at a needed point");
    return it->second;
  };
  auto fixed = alpha.find(g);
  if (fixed == alpha.end() || fixed->second != g) {
    throw std::invalid_argument("alpha must fix g");
  }
  std::vector<int> xs;
  for (int x : tuple) {
    if (x < 0 || x >= s.size()) throw std::invalid_argument("node out of range");
    if (x != g && std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
  }
  std::vector<int> below;
  std::vector<int> cone_order;
  std::map<int, std::vector<int>> blocks;
  for (int x : xs) {
    if (!s.lt(g, x)) {
      below.push_back(x);
      continue;
    }
    const int ci = cone_index(s, g, x);
    if (!blocks.contains(ci)) cone_order.push_back(ci);
    blocks[ci].push_back(x);
  }
  std::stable_sort(below.begin(), below.end(), [&](int u, int v) {
    return s.depth(s.meet(u, g)) < s.depth(s.meet(v, g));
  });
  // Fill the block positions from the end: the last block's images leave
  // every cone still unplaced.
  std::vector<int> remaining = cone_order;
  std::sort(remaining.begin(), remaining.end());
  std::vector<int> reversed;
  while (!remaining.empty()) {
    int chosen = kNone;
    for (int ci : remaining) {
      bool ok = true;
      for (int x : blocks[ci]) {
        const int target = cone_index(s, g, image(x));
        if (std::find(remaining.begin(), remaining.end(), target) != remaining.end()) ok = false;
      }
      if (ok) {
        chosen = ci;
        break;
      }
    }
    if (chosen == kNone) {
      throw std::invalid_argument("alpha moves too few cones to order the tuple");
    }
    reversed.push_back(chosen);
    std::erase(remaining, chosen);
  }
  std::vector<int> ordered = below;
  for (auto it = reversed.rbegin(); it != reversed.rend(); ++it) {
    for (int x : blocks[*it]) ordered.push_back(x);
  }

  AlphaOrderResult out;
  for (int x : ordered) {
    if (std::find(out.tuple.begin(), out.tuple.end(), x) != out.tuple.end()) continue;
    int e = s.meet(x, g);
    for (int y : out.tuple) {
      const int m = s.meet(x, y);
      if (s.depth(m) > s.depth(e)) e = m;
    }
    NodeSet prefix = make_set(out.tuple);
    if (e != g && e != x && !set_contains(cone_closure(s, g, prefix), e)) {
      if (s.lt(g, e)) image(e);
      out.inserted.push_back(static_cast<int>(out.tuple.size()));
      out.tuple.push_back(e);
    }
    out.tuple.push_back(x);
  }
  out.first_above = static_cast<int>(out.tuple.size());
  for (size_t i = 0; i < out.tuple.size(); ++i) {
    if (s.lt(g, out.tuple[i])) {
      out.first_above = static_cast<int>(i);
      break;
    }
  }
  out.certificate = check_alpha_order(s, alpha, out.tuple, g);
  return out;
}

AlphaOrderResult alpha_order(const FiniteAutomorphism& alpha,
                             const std::vector<int>& tuple, int g) {
  PartialIso p;
  for (size_t x = 0; x < alpha.perm.size(); ++x) p[static_cast<int>(x)] = alpha.perm[x];
  return alpha_order(alpha.structure, p, tuple, g);
}

// Move-maximality witnesses

MoveWitness move_maximally_witness(Approximation& appr, PartialAutomorphism& alpha,
                                   const std::vector<int>& c,
                                   const std::vector<int>& p, MoveSide side,
                                   const Relation& rel, int budget) {
  const MixedStructure& s0 = appr.current();
  if (p.empty()) throw std::invalid_argument("empty type");
  for (int v : c) {
    if (!alpha.map.contains(v)) throw std::invalid_argument("base outside the domain of alpha");
  }
  for (int v : p) {
    if (v < 0 || v >= s0.size()) throw std::invalid_argument("node out of range");
  }
  std::vector<int> ctuple = c;
  ctuple.insert(ctuple.end(), p.begin(), p.end());
  const QfTypeCode type = qf_type(s0, ctuple);
  const NodeSet cset = make_set(c);
  const NodeSet cclosed = relation_closure(s0, rel, cset);

  MoveWitness out;
  out.type = type;
  auto judge = [&](const std::vector<int>& a) {
    std::vector<int> img;
    for (int x : a) img.push_back(alpha_image(appr, alpha, x));
    const MixedStructure& s = appr.current();
    IndepVerdict v = side == MoveSide::kRight
                         ? independent(s, rel, make_set(a), make_set(img), cset)
                         : independent(s, rel, make_set(img), make_set(a), cset);
    out.a = a;
    out.image = img;
    out.verdict = v;
    return v.independent;
  };

  bool algebraic = true;
  for (int v : p) algebraic = algebraic && set_contains(cclosed, v);
  if (algebraic) {
    out.algebraic = true;
    out.attempts = 1;
    judge(p);
    return out;
  }
  out.attempts = 1;
  if (judge(p)) return out;
  NodeSet used = cset;
  for (int attempt = 2; attempt <= budget; ++attempt) {
    out.attempts = attempt;
    const MixedStructure& s = appr.current();
    NodeSet spread = used;
    for (int v : cset) {
      spread.push_back(alpha.at(v));
      const int back = alpha.preimage(v);
      if (back != kNone) spread.push_back(back);
    }
    for (int v : out.image) spread.push_back(v);
    for (int v : out.a) spread.push_back(v);
    used = closure(s, make_set(spread));
    const NodeSet cbase = closure(s, cset);
    std::vector<int> cand = extension_witness_tuple(appr, p, cbase, used, rel);
    std::vector<int> check = c;
    check.insert(check.end(), cand.begin(), cand.end());
    if (!(qf_type(appr.current(), check) == type)) continue;
    if (judge(cand)) return out;
  }
  throw std::runtime_error("alpha cannot be extended to a moved witness within budget");
}

}  // namespace treeforge
