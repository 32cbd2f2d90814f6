// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "treeforge/limit.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "treeforge/amalgam.hpp"

namespace treeforge {
namespace {

// Closed iff pairwise meets stay inside, plus the point (Pointed) or every
// projection (Semibranched).
bool fast_closed(const MixedStructure& s, const NodeSet& x) {
  if (x.empty()) return s.flavor() != Flavor::kPointed;
  if (s.flavor() == Flavor::kPointed && !set_contains(x, s.point())) return false;
  for (size_t i = 0; i < x.size(); ++i) {
    if (s.flavor() == Flavor::kSemibranched &&
        !set_contains(x, s.project(x[i]))) {
      return false;
    }
    for (size_t j = i + 1; j < x.size(); ++j) {
      if (!set_contains(x, s.meet(x[i], x[j]))) return false;
    }
  }
  return true;
}

std::vector<NodeSet> all_subsets(const NodeSet& x) {
  std::vector<NodeSet> out;
  const size_t n = x.size();
  for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
    NodeSet sub;
    for (size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) sub.push_back(x[i]);
    }
    out.push_back(std::move(sub));
  }
  return out;
}

std::vector<int> subtree(const MixedStructure& s, int v) {
  std::vector<int> out;
  std::vector<int> stack(s.children(v).begin(), s.children(v).end());
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    out.push_back(x);
    for (int c : s.children(x)) stack.push_back(c);
  }
  return out;
}

MixedStructure seed_structure(const BuildOptions& o) {
  MixedStructure s = MixedStructure::singleton(o.flavor, o.relational);
  if (o.flavor == Flavor::kSemibranched) s.set_treat_tip_as_branch(true);
  return s;
}

}  // namespace

std::string_view extension_kind_name(ExtensionKind k) {
  switch (k) {
    case ExtensionKind::kFresh: return "fresh";
    case ExtensionKind::kBelow: return "below";
    case ExtensionKind::kGap: return "gap";
    case ExtensionKind::kChild: return "child";
  }
  return "?";
}

std::string PointExtension::to_string() const {
  std::ostringstream os;
  os << extension_kind_name(kind) << "(lower=" << lower << ",upper=" << upper
     << (on_branch ? ",branch" : "") << ",nbrs=[";
  for (size_t i = 0; i < neighbors.size(); ++i) {
    os << (i ? "," : "") << neighbors[i];
  }
  os << "]";
  if (depends_on != kNone) {
    os << ",after=" << depends_on << (edge_to_dependency ? ",linked" : "");
  }
  os << ")";
  return os.str();
}

std::vector<PointExtension> enumerate_point_extensions(
    const MixedStructure& s, const NodeSet& base,
    const std::optional<NodeSet>& neighbors) {
  if (!is_closed(s, base)) {
    throw std::invalid_argument("extension base is not closed");
  }
  const bool semi = s.flavor() == Flavor::kSemibranched;
  std::vector<PointExtension> positions;
  if (base.empty()) {
    positions.push_back({ExtensionKind::kFresh, kNone, kNone, semi, {}});
  } else {
    int lowest = base.front();
    for (int x : base) {
      if (s.depth(x) < s.depth(lowest)) lowest = x;
    }
    positions.push_back({ExtensionKind::kBelow, kNone, lowest, semi, {}});
    for (int c : base) {
      int p = kNone;
      for (int x : base) {
        if (s.lt(x, c) && (p == kNone || s.depth(x) > s.depth(p))) p = x;
      }
      if (p != kNone) {
        positions.push_back({ExtensionKind::kGap, p, c, semi && s.in_branch(c), {}});
      }
    }
    for (int c : base) positions.push_back({ExtensionKind::kChild, c, kNone, false, {}});
    if (semi) {
      int m = kNone;
      for (int x : base) {
        if (s.in_branch(x) && (m == kNone || s.depth(x) > s.depth(m))) m = x;
      }
      positions.push_back({ExtensionKind::kChild, m, kNone, true, {}});
    }
  }
  std::vector<NodeSet> patterns{NodeSet{}};
  if (s.relational()) patterns = neighbors ? std::vector<NodeSet>{*neighbors} : all_subsets(base);
  std::vector<PointExtension> out;
  for (const auto& pos : positions) {
    for (const auto& nb : patterns) {
      PointExtension e = pos;
      e.neighbors = nb;
      out.push_back(std::move(e));
    }
  }
  // Branching off a gap interior adds the branch point and the new point.
  const size_t singles = out.size();
  for (size_t i = 0; i < singles; ++i) {
    if (out[i].kind != ExtensionKind::kGap) continue;
    for (const auto& nb : patterns) {
      for (int link = 0; link < (s.relational() ? 2 : 1); ++link) {
        PointExtension e{ExtensionKind::kChild, kNone, kNone, false, nb,
                         static_cast<int>(i), link == 1};
        out.push_back(std::move(e));
      }
    }
  }
  return out;
}

std::optional<PointExtension> describe_point(const MixedStructure& s,
                                             const NodeSet& base, int y) {
  if (set_contains(base, y)) return std::nullopt;
  const bool semi = s.flavor() == Flavor::kSemibranched;
  if (semi) {
    int p = s.project(y);
    if (p != y && !set_contains(base, p)) return std::nullopt;
  }
  if (s.flavor() == Flavor::kPointed && !set_contains(base, s.point())) {
    return std::nullopt;
  }
  PointExtension e;
  e.on_branch = semi && s.in_branch(y);
  for (int c : base) {
    int m = s.meet(y, c);
    if (m != y && !set_contains(base, m)) return std::nullopt;
    if (s.lt(c, y)) {
      if (e.lower == kNone || s.depth(c) > s.depth(e.lower)) e.lower = c;
    } else if (s.lt(y, c)) {
      if (e.upper == kNone || s.depth(c) < s.depth(e.upper)) e.upper = c;
    }
    if (s.has_edge(y, c)) e.neighbors.push_back(c);
  }
  if (base.empty()) {
    if (semi && !e.on_branch) return std::nullopt;
    e.kind = ExtensionKind::kFresh;
  } else if (e.upper != kNone) {
    e.kind = e.lower == kNone ? ExtensionKind::kBelow : ExtensionKind::kGap;
  } else {
    e.kind = ExtensionKind::kChild;
  }
  return e;
}

int find_realization(const MixedStructure& s, const NodeSet& base,
                     const PointExtension& ext, int exclude) {
  if (ext.depends_on != kNone) {
    throw std::invalid_argument("chained descriptor needs its dependency first");
  }
  std::vector<int> candidates;
  switch (ext.kind) {
    case ExtensionKind::kFresh:
      for (int v = 0; v < s.size(); ++v) candidates.push_back(v);
      break;
    case ExtensionKind::kBelow:
      for (int v = s.parent(ext.upper); v != kNone; v = s.parent(v)) {
        candidates.push_back(v);
      }
      break;
    case ExtensionKind::kGap:
      for (int v = s.parent(ext.upper); v != kNone && v != ext.lower;
           v = s.parent(v)) {
        candidates.push_back(v);
      }
      break;
    case ExtensionKind::kChild:
      candidates = subtree(s, ext.lower);
      break;
  }
  std::sort(candidates.begin(), candidates.end());
  for (int y : candidates) {
    if (y == exclude) continue;
    if (s.relational()) {
      bool ok = true;
      for (int c : base) {
        if (s.has_edge(y, c) != set_contains(ext.neighbors, c)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
    }
    auto d = describe_point(s, base, y);
    if (d && *d == ext) return y;
  }
  return kNone;
}

int grow_point(MixedStructure& s, const NodeSet& base, const PointExtension& ext,
               const NodeSet& extra_edges) {
  if (ext.depends_on != kNone) {
    throw std::invalid_argument("chained descriptor needs its dependency first");
  }
  int y = kNone;
  switch (ext.kind) {
    case ExtensionKind::kFresh:
      throw std::logic_error("a fresh point over the empty base is always realized");
    case ExtensionKind::kBelow:
    case ExtensionKind::kGap:
      y = s.insert_above(ext.upper);
      break;
    case ExtensionKind::kChild:
      if (ext.on_branch) {
        y = s.add_leaf(s.tip());
        s.set_tip(y);
      } else {
        y = s.add_leaf(ext.lower);
      }
      break;
  }
  for (int v : ext.neighbors) s.add_edge(y, v);
  for (int v : extra_edges) {
    if (!set_contains(base, v)) s.add_edge(y, v);
  }
  return y;
}

Approximation::Approximation(const BuildOptions& options)
    : Approximation(options, seed_structure(options)) {}

Approximation::Approximation(const BuildOptions& options, MixedStructure start)
    : options_(options),
      current_(std::move(start)),
      rng_(options.seed),
      start_size_(current_.size()) {}

int Approximation::stage_size(int stage) const {
  if (stage < 0 || stage > growths()) throw std::out_of_range("no such stage");
  return start_size_ + stage;
}

std::vector<NodeSet> Approximation::closed_bases_with_max(int x,
                                                          int max_size) const {
  std::vector<NodeSet> out;
  NodeSet pick;
  std::function<void(int)> rec = [&](int from) {
    NodeSet b = pick;
    b.push_back(x);
    if (fast_closed(current_, b)) out.push_back(b);
    if (static_cast<int>(pick.size()) + 1 >= max_size) return;
    for (int v = from; v < x; ++v) {
      pick.push_back(v);
      rec(v + 1);
      pick.pop_back();
    }
  };
  if (max_size >= 1) rec(0);
  return out;
}

void Approximation::activate(int x) {
  std::set<NodeSet> bases;
  if (x == 0 && fast_closed(current_, {})) bases.insert(NodeSet{});
  for (auto& b : closed_bases_with_max(x, options_.exhaustive_base)) {
    bases.insert(std::move(b));
  }
  if (options_.sampled_base > options_.exhaustive_base && x > 0) {
    std::uniform_int_distribution<int> pick(0, x - 1);
    for (int t = 0; t < options_.samples_per_node; ++t) {
      NodeSet gens{x};
      for (int k = 1; k < options_.sampled_base; ++k) gens.push_back(pick(rng_));
      NodeSet b = closure(current_, make_set(gens));
      const int sz = static_cast<int>(b.size());
      if (sz > options_.exhaustive_base && sz <= options_.sampled_base &&
          b.back() == x) {
        bases.insert(std::move(b));
      }
    }
  }
  for (const auto& b : bases) {
    for (auto& e : enumerate_point_extensions(current_, b)) {
      if (e.depends_on == kNone) queue_.push_back({b, std::move(e)});
    }
  }
}

void Approximation::run(int steps) {
  const int target = growths() + steps;
  while (growths() < target) {
    if (queue_.empty()) {
      frontier_ = next_activation_ - 1;
      if (next_activation_ >= current_.size()) break;
      activate(next_activation_++);
      continue;
    }
    ExtensionRequest req = std::move(queue_.front());
    queue_.pop_front();
    realize(req);
  }
  if (queue_.empty()) frontier_ = next_activation_ - 1;
}

int Approximation::realize(const ExtensionRequest& req, bool free_edges,
                           int exclude) {
  int y = find_realization(current_, req.base, req.ext, exclude);
  if (y != kNone) {
    ++realized_existing_;
    return y;
  }
  return grow(req.base, req.ext, free_edges);
}

int Approximation::grow(const NodeSet& base, const PointExtension& ext,
                        bool free_edges) {
  NodeSet extra;
  if (!free_edges && current_.relational() && options_.edge_density > 0) {
    std::bernoulli_distribution coin(options_.edge_density);
    for (int v = 0; v < current_.size(); ++v) {
      if (!set_contains(base, v) && coin(rng_)) extra.push_back(v);
    }
  }
  const int stage = growths();
  int y = grow_point(current_, base, ext, extra);
  NodeSet nb(current_.neighbors(y).begin(), current_.neighbors(y).end());
  log_.push_back({stage, base, ext, y, make_set(nb)});
  return y;
}

std::vector<ExtensionRequest> Approximation::unrealized_over(int max_id,
                                                             int max_size) const {
  std::vector<ExtensionRequest> out;
  auto scan = [&](const NodeSet& b) {
    for (auto& e : enumerate_point_extensions(current_, b)) {
      if (e.depends_on != kNone) continue;
      if (find_realization(current_, b, e) == kNone) out.push_back({b, e});
    }
  };
  if (fast_closed(current_, {})) scan({});
  for (int x = 0; x <= max_id && x < current_.size(); ++x) {
    for (const auto& b : closed_bases_with_max(x, max_size)) scan(b);
  }
  return out;
}

Approximation build_approximation(const BuildOptions& options) {
  if (options.steps < 0) throw std::invalid_argument("steps must be >= 0");
  Approximation a(options);
  a.run(options.steps);
  return a;
}

MixedStructure replay_growths(const BuildOptions& options,
                              const std::vector<GrowthRecord>& log) {
  MixedStructure s = seed_structure(options);
  for (const auto& r : log) {
    int y = grow_point(s, r.base, r.ext, set_difference(r.edges, r.ext.neighbors));
    if (y != r.node) throw std::runtime_error("replay diverged");
  }
  return s;
}

bool is_partial_iso(const MixedStructure& s, const PartialIso& p) {
  std::vector<int> dom;
  std::vector<int> img;
  for (auto [x, y] : p) {
    if (x < 0 || y < 0 || x >= s.size() || y >= s.size()) return false;
    dom.push_back(x);
    img.push_back(y);
  }
  NodeSet img_set = make_set(img);
  if (img_set.size() != img.size()) return false;
  if (!is_closed(s, dom) || !is_closed(s, img_set)) return false;
  return qf_type(s, dom) == qf_type(s, img);
}

namespace {

// Adds w to the domain of p by single-step extensions.
void extend_forward(Approximation& appr, PartialIso& p, int w,
                    const std::optional<NodeSet>& avoid) {
  while (!p.contains(w)) {
    const MixedStructure& s = appr.current();
    NodeSet dom;
    NodeSet img;
    for (auto [x, y] : p) {
      dom.push_back(x);
      img.push_back(y);
    }
    img = make_set(img);
    NodeSet gen = dom;
    gen.push_back(w);
    NodeSet full = closure(s, make_set(gen));
    int z = kNone;
    std::optional<PointExtension> desc;
    for (int c : full) {
      if (set_contains(dom, c)) continue;
      auto d = describe_point(s, dom, c);
      if (d && (z == kNone || s.depth(c) < s.depth(z))) {
        z = c;
        desc = d;
      }
    }
    if (z == kNone) throw std::logic_error("no single-step extension found");
    PointExtension moved = *desc;
    if (moved.lower != kNone) moved.lower = p.at(moved.lower);
    if (moved.upper != kNone) moved.upper = p.at(moved.upper);
    NodeSet nb;
    for (int v : moved.neighbors) nb.push_back(p.at(v));
    moved.neighbors = make_set(nb);
    const int exclude =
        avoid && !set_contains(*avoid, z) ? z : kNone;
    int y = appr.realize({img, moved}, true, exclude);
    p[z] = y;
  }
}

}  // namespace

PartialIso extend_partial_iso(Approximation& appr, const PartialIso& p,
                              const std::vector<int>& want,
                              const std::optional<NodeSet>& avoid_fix_outside) {
  if (!is_partial_iso(appr.current(), p)) {
    throw std::invalid_argument("map is not a partial isomorphism");
  }
  PartialIso fwd = p;
  for (int w : want) {
    if (w < 0 || w >= appr.current().size()) {
      throw std::invalid_argument("requested node out of range");
    }
    extend_forward(appr, fwd, w, avoid_fix_outside);
    PartialIso inv;
    for (auto [x, y] : fwd) inv[y] = x;
    extend_forward(appr, inv, w, avoid_fix_outside);
    fwd.clear();
    for (auto [y, x] : inv) fwd[x] = y;
  }
  if (!is_partial_iso(appr.current(), fwd)) {
    throw std::logic_error("extension lost the partial isomorphism");
  }
  return fwd;
}

namespace {

struct MixSearch {
  const MixedStructure& s;
  const std::vector<int>& a1;
  const std::vector<int>& a2;
  std::vector<int> meet_index;  // (i, j) -> k with a1_i ^ a1_j = a1_k
  std::vector<int> proj_index;  // i -> k with pi(a1_i) = a1_k
  std::vector<int> a;
  std::vector<char> used;
  long visits = 0;
  long limit = 200000;
  int m() const { return static_cast<int>(a1.size()); }

  bool fits(int i, int v) {
    const MixedStructure& t = s;
    if (t.flavor() == Flavor::kPointed && (a1[i] == t.point()) != (v == t.point())) {
      return false;
    }
    if (t.flavor() == Flavor::kSemibranched &&
        t.in_branch(a1[i]) != t.in_branch(v)) {
      return false;
    }
    for (int j = 0; j < i; ++j) {
      if (t.leq(a1[j], a1[i]) != t.leq(a[j], v)) return false;
      if (t.leq(a1[i], a1[j]) != t.leq(v, a[j])) return false;
      if (t.has_edge(a2[j], a2[i]) != t.has_edge(a[j], v)) return false;
      int k = meet_index[j * m() + i];
      if (k < i && t.meet(a[j], v) != a[k]) return false;
      for (int l = 0; l < j; ++l) {
        if (meet_index[l * m() + j] == i && t.meet(a[l], a[j]) != v) return false;
      }
    }
    if (t.flavor() == Flavor::kSemibranched) {
      if (proj_index[i] < i && t.project(v) != a[proj_index[i]]) return false;
      for (int j = 0; j < i; ++j) {
        if (proj_index[j] == i && t.project(a[j]) != v) return false;
      }
    }
    return true;
  }

  bool rec(int i) {
    if (i == m()) return true;
    for (int v = 0; v < s.size(); ++v) {
      if (++visits > limit) return false;
      if (used[v] || !fits(i, v)) continue;
      used[v] = 1;
      a[i] = v;
      if (rec(i + 1)) return true;
      used[v] = 0;
    }
    return false;
  }
};

}  // namespace

MixReport check_generic_mix(const Approximation& appr, int budget,
                            std::uint64_t seed, int max_size) {
  MixReport rep;
  const MixedStructure& s = appr.current();
  if (budget <= 0 || s.size() == 0) return rep;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> node(0, s.size() - 1);
  std::uniform_int_distribution<int> gens_count(1, 2);
  for (int t = 0; t < budget; ++t) {
    NodeSet c;
    for (int tries = 0; tries < 1000; ++tries) {
      NodeSet gens;
      const int k = gens_count(rng);
      for (int i = 0; i < k; ++i) gens.push_back(node(rng));
      c = closure(s, make_set(gens));
      if (static_cast<int>(c.size()) <= max_size) break;
    }
    if (static_cast<int>(c.size()) > max_size) continue;
    std::vector<int> a1(c.begin(), c.end());
    std::shuffle(a1.begin(), a1.end(), rng);
    const int m = static_cast<int>(a1.size());
    // Graph side: same constant pattern, otherwise an arbitrary injective tuple.
    std::vector<int> pool;
    for (int v = 0; v < s.size(); ++v) {
      if (!(s.flavor() == Flavor::kPointed && v == s.point())) pool.push_back(v);
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<int> a2(m);
    size_t next = 0;
    for (int i = 0; i < m; ++i) {
      a2[i] = s.flavor() == Flavor::kPointed && a1[i] == s.point() ? s.point()
                                                                   : pool[next++];
    }
    MixSearch search{s, a1, a2, {}, {}, std::vector<int>(m, kNone),
                     std::vector<char>(s.size(), 0)};
    search.meet_index.assign(m * m, kNone);
    search.proj_index.assign(m, kNone);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        int w = s.meet(a1[i], a1[j]);
        search.meet_index[i * m + j] =
            static_cast<int>(std::find(a1.begin(), a1.end(), w) - a1.begin());
      }
      if (s.flavor() == Flavor::kSemibranched) {
        int w = s.project(a1[i]);
        search.proj_index[i] =
            static_cast<int>(std::find(a1.begin(), a1.end(), w) - a1.begin());
      }
    }
    ++rep.samples;
    if (search.rec(0)) {
      ++rep.realized;
    } else {
      ++rep.missing;
      rep.missing_examples.emplace_back(a1, a2);
    }
  }
  return rep;
}

}  // namespace treeforge
