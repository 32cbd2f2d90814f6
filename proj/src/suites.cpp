// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "treeforge/suites.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <tuple>
#include <utility>

#include "treeforge/amalgam.hpp"
#include "treeforge/autolab.hpp"
#include "treeforge/core.hpp"
#include "treeforge/enumerate.hpp"
#include "treeforge/indep.hpp"
#include "treeforge/limit.hpp"

namespace treeforge {
namespace {

using Msg = std::optional<std::string>;

// Leaves the nested loops of a suite at the first counterexample.
struct Stop {};

struct Ctx {
  int max_size = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t instances = 0;
  std::optional<Counterexample> cx;

  [[noreturn]] void fail(const MixedStructure& s, Json data, std::string msg) {
    cx = Counterexample{structure_to_json(s), std::move(data), std::move(msg)};
    throw Stop{};
  }
  template <class D>
  void check(const MixedStructure& s, Msg m, D&& data) {
    ++instances;
    if (m) fail(s, data(), std::move(*m));
  }
};

// Exceptions thrown by the code under test count as violations of the
// instance; budget refusals stay errors.
template <class F>
Msg guarded(F&& f) {
  try {
    return f();
  } catch (const BudgetExceeded&) {
    throw;
  } catch (const std::exception& e) {
    return std::string("exception: ") + e.what();
  }
}

void each_structure(Flavor f, int max_n, bool edges,
                    const std::function<void(const MixedStructure&)>& fn) {
  for (int n = 1; n <= max_n; ++n) for_each_structure(f, n, edges, fn);
}

std::vector<MixedStructure> structures_upto(Flavor f, int max_n, bool edges) {
  if (max_n < 1) return {};
  return enumerate_structures_upto(f, max_n, edges);
}

NodeSet mask_ids(std::uint32_t x, const std::vector<int>& u) {
  NodeSet out;
  for (size_t i = 0; i < u.size(); ++i) {
    if (x >> i & 1u) out.push_back(u[i]);
  }
  return make_set(out);
}

std::vector<int> iota_ids(int n) {
  std::vector<int> u(n);
  for (int i = 0; i < n; ++i) u[i] = i;
  return u;
}

std::vector<int> json_ids(const Json& j) { return j.get<std::vector<int>>(); }

NodeSet json_set(const Json& j) { return make_set(json_ids(j)); }

std::uint32_t ids_mask(const NodeSet& ids, const std::vector<int>& u) {
  std::uint32_t x = 0;
  for (int v : ids) {
    auto it = std::find(u.begin(), u.end(), v);
    if (it == u.end()) throw std::invalid_argument("id outside the universe");
    x |= 1u << (it - u.begin());
  }
  return x;
}

// Disjoint (A, B, C) over m elements, base-4 digits.
struct Triple {
  std::uint32_t a, b, c;
};
const std::vector<Triple>& disjoint_triples(int m) {
  static std::map<int, std::vector<Triple>> cache;
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  std::vector<Triple> out;
  std::uint32_t total = 1u << (2 * m);
  for (std::uint32_t code = 0; code < total; ++code) {
    Triple t{0, 0, 0};
    for (int i = 0; i < m; ++i) {
      switch (code >> (2 * i) & 3u) {
        case 1: t.a |= 1u << i; break;
        case 2: t.b |= 1u << i; break;
        case 3: t.c |= 1u << i; break;
        default: break;
      }
    }
    out.push_back(t);
  }
  return cache.emplace(m, std::move(out)).first->second;
}

Json relation_json(const Relation& r) {
  return {{"relation", std::string(relation_name(r.kind))}, {"gamma", r.gamma}};
}
Relation relation_from(const Json& d) {
  return {parse_relation(d.at("relation").get<std::string>()),
          d.at("gamma").get<int>()};
}

// Memoized verdicts of one relation over subsets of a small universe. The
// key keeps A, B and C as given, overlaps included.
class RelTable {
 public:
  using Memo = std::vector<std::int8_t>;

  RelTable(const MixedStructure& s, Relation rel, std::vector<int> universe,
           std::shared_ptr<Memo> memo = nullptr)
      : s_(s), rel_(rel), u_(std::move(universe)), m_(static_cast<int>(u_.size())) {
    if (m_ > 6) throw std::logic_error("relation table universe above 6");
    spread_.assign(size_t{1} << m_, 0);
    for (std::uint32_t x = 0; x < (1u << m_); ++x) {
      std::uint32_t k = 0;
      for (int i = 0; i < m_; ++i) {
        if (x >> i & 1u) k |= 1u << (3 * i);
      }
      spread_[x] = k;
    }
    const size_t total = size_t{1} << (3 * m_);
    memo_ = memo ? std::move(memo) : std::make_shared<Memo>(total, -1);
    if (memo_->size() != total) memo_->assign(total, -1);
    clo_.resize(size_t{1} << m_);
    clo_done_.assign(size_t{1} << m_, 0);
  }

  const MixedStructure& structure() const { return s_; }
  const Relation& relation() const { return rel_; }
  const std::vector<int>& universe() const { return u_; }
  int m() const { return m_; }
  NodeSet ids(std::uint32_t x) const { return mask_ids(x, u_); }

  bool indep(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    const std::uint32_t key = spread_[a] | spread_[b] << 1 | spread_[c] << 2;
    std::int8_t& v = (*memo_)[key];
    if (v < 0) v = independent(s_, rel_, ids(a), ids(b), ids(c)).independent ? 1 : 0;
    return v == 1;
  }

  const NodeSet& clo(std::uint32_t x) {
    if (!clo_done_[x]) {
      clo_[x] = relation_closure(s_, rel_, ids(x));
      clo_done_[x] = 1;
    }
    return clo_[x];
  }

 private:
  const MixedStructure& s_;
  Relation rel_;
  std::vector<int> u_;
  int m_;
  std::vector<std::uint32_t> spread_;
  std::shared_ptr<Memo> memo_;
  std::vector<NodeSet> clo_;
  std::vector<char> clo_done_;
};

// Axioms checked per disjoint triple

enum class Ax {
  kMonotonicity,
  kNormality,
  kExistence,
  kFiniteCharacter,
  kLeftBaseMonotonicity,
  kRightBaseMonotonicity,
  kLeftTransitivity,
  kRightTransitivity,
  kReflexivity,
  kGeneration,
  kInvariance,
};

constexpr std::array<std::pair<Ax, std::string_view>, 11> kAxNames{{
    {Ax::kMonotonicity, "monotonicity"},
    {Ax::kNormality, "normality"},
    {Ax::kExistence, "existence"},
    {Ax::kFiniteCharacter, "finite-character"},
    {Ax::kLeftBaseMonotonicity, "left-base-monotonicity"},
    {Ax::kRightBaseMonotonicity, "right-base-monotonicity"},
    {Ax::kLeftTransitivity, "left-transitivity"},
    {Ax::kRightTransitivity, "right-transitivity"},
    {Ax::kReflexivity, "reflexivity"},
    {Ax::kGeneration, "independent-generation"},
    {Ax::kInvariance, "invariance"},
}};

std::string_view ax_name(Ax a) {
  for (auto [k, n] : kAxNames) {
    if (k == a) return n;
  }
  return "?";
}

Ax parse_ax(std::string_view name) {
  for (auto [k, n] : kAxNames) {
    if (n == name) return k;
  }
  throw std::invalid_argument("unknown axiom: " + std::string(name));
}

std::uint32_t apply_perm(std::uint32_t x, const std::vector<int>& perm) {
  std::uint32_t out = 0;
  for (size_t i = 0; i < perm.size(); ++i) {
    if (x >> i & 1u) out |= 1u << perm[i];
  }
  return out;
}

// p, q: subsets the instance ranges over; perm: universe permutation.
bool axiom_holds(RelTable& t, Ax ax, std::uint32_t A, std::uint32_t B,
                 std::uint32_t C, std::uint32_t p, std::uint32_t q,
                 const std::vector<int>& perm) {
  switch (ax) {
    case Ax::kMonotonicity:
      return !t.indep(A, B, C) || t.indep(p, q, C);
    case Ax::kNormality:
      return !t.indep(A, B, C) || t.indep(A | C, B | C, C);
    case Ax::kExistence:
      return t.indep(A | C, B, A | C) && t.indep(A, B | C, B | C);
    case Ax::kFiniteCharacter: {
      bool all = true;
      for (std::uint32_t a0 = A;; a0 = (a0 - 1) & A) {
        for (std::uint32_t b0 = B;; b0 = (b0 - 1) & B) {
          all = all && t.indep(a0, b0, C);
          if (b0 == 0) break;
        }
        if (a0 == 0) break;
      }
      return t.indep(A, B, C) == all;
    }
    case Ax::kLeftBaseMonotonicity:
      return !t.indep(A | C, B, C) || t.indep(A | C, B, C | p);
    case Ax::kRightBaseMonotonicity:
      return !t.indep(A, B | C, C) || t.indep(A, B | C, C | p);
    case Ax::kLeftTransitivity:
      return !(t.indep(A | C, B, C | p) && t.indep(C | p, B, C)) ||
             t.indep(A | C, B, C);
    case Ax::kRightTransitivity:
      return !(t.indep(A, B | C, C | p) && t.indep(A, C | p, C)) ||
             t.indep(A, B | C, C);
    case Ax::kReflexivity:
      return !t.indep(A, A, C) || set_subset(t.ids(A), t.clo(C));
    case Ax::kGeneration:
      return !t.indep(A, B, C) ||
             t.clo(A | B | C) == set_union(t.clo(A | C), t.clo(B | C));
    case Ax::kInvariance:
      return t.indep(A, B, C) ==
             t.indep(apply_perm(A, perm), apply_perm(B, perm), apply_perm(C, perm));
  }
  return true;
}

struct AxHit {
  Ax ax;
  std::uint32_t p = 0;
  std::uint32_t q = 0;
  std::vector<int> perm;
};

std::optional<AxHit> axioms_on_triple(RelTable& t, std::uint32_t A,
                                      std::uint32_t B, std::uint32_t C,
                                      const std::vector<std::vector<int>>& autos) {
  static const std::vector<int> kNoPerm;
  auto fails = [&](Ax ax, std::uint32_t p, std::uint32_t q) {
    return !axiom_holds(t, ax, A, B, C, p, q, kNoPerm);
  };
  for (std::uint32_t x = A; x; x &= x - 1) {
    const std::uint32_t bit = x & (~x + 1);
    if (fails(Ax::kMonotonicity, A ^ bit, B)) return AxHit{Ax::kMonotonicity, A ^ bit, B, {}};
  }
  for (std::uint32_t x = B; x; x &= x - 1) {
    const std::uint32_t bit = x & (~x + 1);
    if (fails(Ax::kMonotonicity, A, B ^ bit)) return AxHit{Ax::kMonotonicity, A, B ^ bit, {}};
  }
  for (Ax ax : {Ax::kNormality, Ax::kExistence, Ax::kFiniteCharacter,
                Ax::kReflexivity, Ax::kGeneration}) {
    if (fails(ax, 0, 0)) return AxHit{ax, 0, 0, {}};
  }
  for (std::uint32_t p = A;; p = (p - 1) & A) {
    if (fails(Ax::kLeftBaseMonotonicity, p, 0)) return AxHit{Ax::kLeftBaseMonotonicity, p, 0, {}};
    if (fails(Ax::kLeftTransitivity, p, 0)) return AxHit{Ax::kLeftTransitivity, p, 0, {}};
    if (p == 0) break;
  }
  for (std::uint32_t p = B;; p = (p - 1) & B) {
    if (fails(Ax::kRightBaseMonotonicity, p, 0)) return AxHit{Ax::kRightBaseMonotonicity, p, 0, {}};
    if (fails(Ax::kRightTransitivity, p, 0)) return AxHit{Ax::kRightTransitivity, p, 0, {}};
    if (p == 0) break;
  }
  for (const auto& perm : autos) {
    if (!axiom_holds(t, Ax::kInvariance, A, B, C, 0, 0, perm)) {
      return AxHit{Ax::kInvariance, 0, 0, perm};
    }
  }
  return std::nullopt;
}

Json axiom_data(const RelTable& t, Ax ax, std::uint32_t A, std::uint32_t B,
                std::uint32_t C, std::uint32_t p, std::uint32_t q,
                const std::vector<int>& perm) {
  Json d = relation_json(t.relation());
  d["check"] = "axiom";
  d["axiom"] = std::string(ax_name(ax));
  d["universe"] = t.universe();
  d["a"] = t.ids(A);
  d["b"] = t.ids(B);
  d["c"] = t.ids(C);
  d["p"] = t.ids(p);
  d["q"] = t.ids(q);
  d["perm"] = perm;
  return d;
}

std::string axiom_message(Ax ax, const RelTable& t, std::uint32_t A,
                          std::uint32_t B, std::uint32_t C) {
  auto show = [&](std::uint32_t x) {
    std::string out = "{";
    for (int v : t.ids(x)) out += (out.size() > 1 ? "," : "") + std::to_string(v);
    return out + "}";
  };
  return std::string(ax_name(ax)) + " fails for A=" + show(A) + " B=" + show(B) +
         " C=" + show(C);
}

Msg replay_axiom(const MixedStructure& s, const Json& d) {
  const Relation rel = relation_from(d);
  const std::vector<int> u = json_ids(d.at("universe"));
  RelTable t(s, rel, u);
  const Ax ax = parse_ax(d.at("axiom").get<std::string>());
  const std::uint32_t A = ids_mask(json_set(d.at("a")), u);
  const std::uint32_t B = ids_mask(json_set(d.at("b")), u);
  const std::uint32_t C = ids_mask(json_set(d.at("c")), u);
  const std::uint32_t p = ids_mask(json_set(d.at("p")), u);
  const std::uint32_t q = ids_mask(json_set(d.at("q")), u);
  const std::vector<int> perm = json_ids(d.at("perm"));
  return guarded([&]() -> Msg {
    if (axiom_holds(t, ax, A, B, C, p, q, perm)) return std::nullopt;
    return axiom_message(ax, t, A, B, C);
  });
}

using MemoCache = std::map<std::pair<std::vector<int>, int>, std::shared_ptr<RelTable::Memo>>;

// Cone and semibranch verdicts only read the tree, point and tip, so
// structures sharing them share a memo.
std::shared_ptr<RelTable::Memo> shared_memo(MemoCache& cache, const MixedStructure& s,
                                            const Relation& rel) {
  if (rel.kind != RelationKind::kCone && rel.kind != RelationKind::kSemibranch) {
    return nullptr;
  }
  auto key = std::make_pair(s.parents(), s.flavor() == Flavor::kPointed ? s.point() : s.tip());
  auto& slot = cache[key];
  if (!slot) slot = std::make_shared<RelTable::Memo>(size_t{1} << (3 * s.size()), -1);
  return slot;
}

// Every disjoint triple of every structure, automorphisms included.
void axioms_exhaustive(Ctx& ctx, const std::vector<MixedStructure>& structs,
                       const Relation& rel) {
  MemoCache cache;
  for (const auto& s : structs) {
    RelTable t(s, rel, iota_ids(s.size()), shared_memo(cache, s, rel));
    std::vector<std::vector<int>> autos;
    for (auto& perm : structure_automorphisms(s)) {
      bool id = true;
      for (int i = 0; i < s.size(); ++i) id = id && perm[i] == i;
      if (!id) autos.push_back(std::move(perm));
    }
    for (const Triple& tr : disjoint_triples(s.size())) {
      ++ctx.instances;
      std::optional<AxHit> hit;
      Msg exc = guarded([&]() -> Msg {
        hit = axioms_on_triple(t, tr.a, tr.b, tr.c, autos);
        return std::nullopt;
      });
      if (exc) {
        Json d = axiom_data(t, Ax::kNormality, tr.a, tr.b, tr.c, 0, 0, {});
        d["check"] = "axiom-exception";
        ctx.fail(s, d, *exc);
      }
      if (hit) {
        ctx.fail(s, axiom_data(t, hit->ax, tr.a, tr.b, tr.c, hit->p, hit->q, hit->perm),
                 axiom_message(hit->ax, t, tr.a, tr.b, tr.c));
      }
    }
  }
}

Msg replay_axiom_exception(const MixedStructure& s, const Json& d) {
  const Relation rel = relation_from(d);
  const std::vector<int> u = json_ids(d.at("universe"));
  RelTable t(s, rel, u);
  const std::uint32_t A = ids_mask(json_set(d.at("a")), u);
  const std::uint32_t B = ids_mask(json_set(d.at("b")), u);
  const std::uint32_t C = ids_mask(json_set(d.at("c")), u);
  return guarded([&]() -> Msg {
    axioms_on_triple(t, A, B, C, {});
    return std::nullopt;
  });
}

// Random disjoint triples of at most six nodes in a seeded approximation.
void axioms_randomized(Ctx& ctx, Flavor flavor, bool relational,
                       const Relation& rel, int steps) {
  if (ctx.trials <= 0) return;
  BuildOptions o;
  o.flavor = flavor;
  o.relational = relational;
  o.steps = steps;
  o.seed = ctx.seed;
  Approximation appr = build_approximation(o);
  const MixedStructure& s = appr.current();
  std::mt19937_64 rng(ctx.seed * 0x9E3779B97F4A7C15ULL + 17);
  std::uniform_int_distribution<int> node(0, s.size() - 1);
  std::uniform_int_distribution<int> count(1, std::min(6, s.size()));
  std::uniform_int_distribution<int> side(1, 3);
  for (int trial = 0; trial < ctx.trials; ++trial) {
    const int k = count(rng);
    NodeSet picked;
    while (static_cast<int>(picked.size()) < k) {
      int v = node(rng);
      if (!set_contains(picked, v)) picked = set_union(picked, {v});
    }
    std::uint32_t A = 0, B = 0, C = 0;
    for (int i = 0; i < k; ++i) {
      switch (side(rng)) {
        case 1: A |= 1u << i; break;
        case 2: B |= 1u << i; break;
        default: C |= 1u << i; break;
      }
    }
    RelTable t(s, rel, picked);
    ++ctx.instances;
    std::optional<AxHit> hit;
    Msg exc = guarded([&]() -> Msg {
      hit = axioms_on_triple(t, A, B, C, {});
      return std::nullopt;
    });
    if (exc) {
      Json d = axiom_data(t, Ax::kNormality, A, B, C, 0, 0, {});
      d["check"] = "axiom-exception";
      ctx.fail(s, d, *exc);
    }
    if (hit) {
      ctx.fail(s, axiom_data(t, hit->ax, A, B, C, hit->p, hit->q, hit->perm),
               axiom_message(hit->ax, t, A, B, C));
    }
  }
}

// Tuple of the sorted members of A, then B, then C.
std::vector<int> block_tuple(std::initializer_list<NodeSet> blocks) {
  std::vector<int> out;
  for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

struct TypedInstance {
  MixedStructure s;
  NodeSet a, b, c;
};

Json instance_json(const TypedInstance& x) {
  return {{"structure", structure_to_json(x.s)}, {"a", x.a}, {"b", x.b}, {"c", x.c}};
}
TypedInstance instance_from(const Json& j) {
  return {structure_from_json(j.at("structure")), json_set(j.at("a")),
          json_set(j.at("b")), json_set(j.at("c"))};
}

bool inst_indep(const TypedInstance& x, const Relation& rel) {
  return independent(x.s, rel, x.a, x.b, x.c).independent;
}

// Equal qf types of (A, B, C) and different verdicts.
Msg definability_check(const TypedInstance& x, const TypedInstance& y,
                       const Relation& rel) {
  return guarded([&]() -> Msg {
    if (x.a.size() != y.a.size() || x.b.size() != y.b.size() ||
        x.c.size() != y.c.size()) {
      return std::nullopt;
    }
    if (qf_type(x.s, block_tuple({x.a, x.b, x.c})) !=
        qf_type(y.s, block_tuple({y.a, y.b, y.c}))) {
      return std::nullopt;
    }
    if (inst_indep(x, rel) == inst_indep(y, rel)) return std::nullopt;
    return std::string("qf-definability fails: equal types, different verdicts");
  });
}

// Both independent, equal types of a and of b over C, different joint types.
Msg stationarity_check(const TypedInstance& x, const TypedInstance& y,
                       const Relation& rel) {
  return guarded([&]() -> Msg {
    if (x.a.size() != y.a.size() || x.b.size() != y.b.size() ||
        x.c.size() != y.c.size()) {
      return std::nullopt;
    }
    if (!inst_indep(x, rel) || !inst_indep(y, rel)) return std::nullopt;
    if (qf_type(x.s, block_tuple({x.c, x.a})) != qf_type(y.s, block_tuple({y.c, y.a})) ||
        qf_type(x.s, block_tuple({x.c, x.b})) != qf_type(y.s, block_tuple({y.c, y.b}))) {
      return std::nullopt;
    }
    if (qf_type(x.s, block_tuple({x.c, x.a, x.b})) ==
        qf_type(y.s, block_tuple({y.c, y.a, y.b}))) {
      return std::nullopt;
    }
    return std::string("qf-stationarity fails: types over C agree, joint types differ");
  });
}

// Verdict inside the closed substructure on X against the verdict in s.
Msg embedding_check(const MixedStructure& s, const NodeSet& x, const NodeSet& a,
                    const NodeSet& b, const NodeSet& c, const Relation& rel) {
  return guarded([&]() -> Msg {
    Substructure sub = induced_substructure(s, x);
    auto up = [&](const NodeSet& local) {
      NodeSet out;
      for (int v : local) out.push_back(sub.ids.at(v));
      return make_set(out);
    };
    Relation inner = rel;
    if (rel.gamma != kNone) {
      auto it = std::find(sub.ids.begin(), sub.ids.end(), rel.gamma);
      if (it == sub.ids.end()) return std::nullopt;
      inner.gamma = static_cast<int>(it - sub.ids.begin());
    }
    const bool lo = independent(sub.structure, inner, a, b, c).independent;
    const bool hi = independent(s, rel, up(a), up(b), up(c)).independent;
    if (lo == hi) return std::nullopt;
    return std::string("embedding invariance fails: substructure says ") +
           (lo ? "independent" : "dependent");
  });
}

// Definability, stationarity (types of the sorted blocks, pooled across all
// structures) and invariance under embeddings of closed substructures.
void type_axioms(Ctx& ctx, const std::vector<MixedStructure>& structs,
                 const Relation& rel) {
  using Key = std::tuple<size_t, size_t, size_t, QfTypeCode>;
  using StatKey = std::tuple<size_t, size_t, size_t, QfTypeCode, QfTypeCode>;
  std::map<Key, std::pair<size_t, Triple>> seen;
  std::map<StatKey, std::pair<size_t, Triple>> joint;
  MemoCache cache;
  auto inst = [&](size_t idx, const Triple& tr) {
    const auto& s = structs[idx];
    auto u = iota_ids(s.size());
    return TypedInstance{s, mask_ids(tr.a, u), mask_ids(tr.b, u), mask_ids(tr.c, u)};
  };
  for (size_t idx = 0; idx < structs.size(); ++idx) {
    const auto& s = structs[idx];
    RelTable t(s, rel, iota_ids(s.size()), shared_memo(cache, s, rel));
    for (const Triple& tr : disjoint_triples(s.size())) {
      ++ctx.instances;
      TypedInstance x = inst(idx, tr);
      bool v = false;
      QfTypeCode code;
      Msg exc = guarded([&]() -> Msg {
        v = t.indep(tr.a, tr.b, tr.c);
        code = qf_type(s, block_tuple({x.a, x.b, x.c}));
        return std::nullopt;
      });
      if (exc) {
        Json d = relation_json(rel);
        d["check"] = "qf-definability";
        d["x"] = instance_json(x);
        d["y"] = instance_json(x);
        ctx.fail(s, d, *exc);
      }
      Key key{x.a.size(), x.b.size(), x.c.size(), code};
      auto [it, fresh] = seen.emplace(key, std::make_pair(idx, tr));
      if (!fresh) {
        TypedInstance y = inst(it->second.first, it->second.second);
        if (Msg m = definability_check(x, y, rel)) {
          Json d = relation_json(rel);
          d["check"] = "qf-definability";
          d["x"] = instance_json(x);
          d["y"] = instance_json(y);
          ctx.fail(s, d, *m);
        }
      }
      if (!v) continue;
      StatKey sk{x.a.size(), x.b.size(), x.c.size(), qf_type(s, block_tuple({x.c, x.a})),
                 qf_type(s, block_tuple({x.c, x.b}))};
      auto [jt, jfresh] = joint.emplace(sk, std::make_pair(idx, tr));
      if (!jfresh) {
        TypedInstance y = inst(jt->second.first, jt->second.second);
        if (Msg m = stationarity_check(x, y, rel)) {
          Json d = relation_json(rel);
          d["check"] = "qf-stationarity";
          d["x"] = instance_json(x);
          d["y"] = instance_json(y);
          ctx.fail(s, d, *m);
        }
      }
    }
    // Closed proper substructures.
    const std::uint32_t full = (1u << s.size()) - 1;
    for (std::uint32_t xm = 1; xm < full; ++xm) {
      const NodeSet xs = mask_ids(xm, iota_ids(s.size()));
      if (!is_closed(s, xs)) continue;
      Substructure sub = induced_substructure(s, xs);
      Relation inner = rel;
      if (rel.gamma != kNone) {
        auto it = std::find(sub.ids.begin(), sub.ids.end(), rel.gamma);
        if (it == sub.ids.end()) continue;
        inner.gamma = static_cast<int>(it - sub.ids.begin());
      }
      RelTable ts(sub.structure, inner, iota_ids(sub.structure.size()));
      auto up = [&](std::uint32_t local) {
        std::uint32_t out = 0;
        for (int i = 0; i < sub.structure.size(); ++i) {
          if (local >> i & 1u) out |= 1u << sub.ids[i];
        }
        return out;
      };
      for (const Triple& tr : disjoint_triples(sub.structure.size())) {
        ++ctx.instances;
        bool same = true;
        Msg exc = guarded([&]() -> Msg {
          same = ts.indep(tr.a, tr.b, tr.c) == t.indep(up(tr.a), up(tr.b), up(tr.c));
          return std::nullopt;
        });
        if (exc || !same) {
          auto lu = iota_ids(sub.structure.size());
          const NodeSet a = mask_ids(tr.a, lu), b = mask_ids(tr.b, lu), c = mask_ids(tr.c, lu);
          Json d = relation_json(rel);
          d["check"] = "embedding-invariance";
          d["x"] = xs;
          d["a"] = a;
          d["b"] = b;
          d["c"] = c;
          ctx.fail(s, d, exc ? *exc : *embedding_check(s, xs, a, b, c, rel));
        }
      }
    }
  }
}

// Tree lemmas

Msg closure_bound_check(const MixedStructure& s, const NodeSet& x) {
  return guarded([&]() -> Msg {
    const NodeSet cl = closure(s, x);
    const size_t k = x.size();
    if (!is_closed(s, cl)) return std::string("closure is not closed");
    if (s.flavor() == Flavor::kSemibranched) {
      if (cl.size() > 2 * k + 1) {
        return "|<X>| = " + std::to_string(cl.size()) + " exceeds 2|X|+1";
      }
      int top = kNone;
      for (int v : x) {
        const int p = s.project(v);
        if (top == kNone || s.lt(top, p)) top = p;
      }
      if (meet_closure(s, set_union(x, {top})) != cl) {
        return std::string("<X> differs from the meets of X and its top projection");
      }
      return std::nullopt;
    }
    if (cl.size() > 2 * k - 1) {
      return "|<X>| = " + std::to_string(cl.size()) + " exceeds 2|X|-1";
    }
    for (int v = 0; v < s.size(); ++v) {
      if (set_contains(x, v)) continue;
      int e = kNone;
      for (int y : x) {
        const int m = s.meet(v, y);
        if (e == kNone || s.depth(m) > s.depth(e)) e = m;
      }
      if (closure(s, set_union(x, {v})) != set_union(cl, make_set({e, v}))) {
        return "adding " + std::to_string(v) + " adds more than the top meet and itself";
      }
    }
    return std::nullopt;
  });
}

void suite_closure_bound(Ctx& ctx) {
  for (Flavor f : {Flavor::kPlain, Flavor::kSemibranched}) {
    each_structure(f, ctx.max_size, false, [&](const MixedStructure& s) {
      const auto u = iota_ids(s.size());
      for (std::uint32_t xm = 1; xm < (1u << s.size()); ++xm) {
        const NodeSet x = mask_ids(xm, u);
        ctx.check(s, closure_bound_check(s, x), [&] {
          return Json{{"check", "closure-bound"}, {"x", x}};
        });
      }
    });
  }
}

Msg three_points_check(const MixedStructure& s, int a, int b, int c) {
  return guarded([&]() -> Msg {
    const int ab = s.meet(a, b), ac = s.meet(a, c), bc = s.meet(b, c);
    const int abc = s.meet(ab, c);
    const int hits = (ab == abc) + (ac == abc) + (bc == abc);
    if (hits >= 2) return std::nullopt;
    return "only " + std::to_string(hits) + " pairwise meet(s) equal a^b^c";
  });
}

void suite_three_points(Ctx& ctx) {
  each_structure(Flavor::kPlain, ctx.max_size, false, [&](const MixedStructure& s) {
    const int n = s.size();
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) {
          ctx.check(s, three_points_check(s, a, b, c), [&] {
            return Json{{"check", "three-points"}, {"tuple", {a, b, c}}};
          });
        }
      }
    }
  });
}

Msg four_points_check(const MixedStructure& s, int a, int b, int c, int d) {
  return guarded([&]() -> Msg {
    if (s.meet(a, c) != s.meet(b, c)) return std::nullopt;
    if (s.meet(a, d) == s.meet(b, d)) return std::nullopt;
    if (s.meet(a, c) == s.meet(d, c)) return std::nullopt;
    return std::string("a^c = b^c and a^d != b^d but a^c != d^c");
  });
}

void suite_four_points(Ctx& ctx) {
  each_structure(Flavor::kPlain, ctx.max_size, false, [&](const MixedStructure& s) {
    const int n = s.size();
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) {
          for (int d = 0; d < n; ++d) {
            ctx.check(s, four_points_check(s, a, b, c, d), [&] {
              return Json{{"check", "four-points"}, {"tuple", {a, b, c, d}}};
            });
          }
        }
      }
    }
  });
}

bool in_cone_of(const MixedStructure& s, int g, const NodeSet& c, int x) {
  if (!s.lt(g, x)) return false;
  for (int y : c) {
    if (s.lt(g, s.meet(x, y))) return true;
  }
  return false;
}

Msg cone_indisc_check(const MixedStructure& s, const NodeSet& c, int a, int b) {
  return guarded([&]() -> Msg {
    const int g = s.point();
    if (!s.lt(g, a) || !s.lt(g, b)) return std::nullopt;
    if (in_cone_of(s, g, c, a) || in_cone_of(s, g, c, b)) return std::nullopt;
    std::vector<int> ta(c.begin(), c.end());
    std::vector<int> tb = ta;
    ta.push_back(a);
    tb.push_back(b);
    if (qf_type(s, ta) == qf_type(s, tb)) return std::nullopt;
    return std::string("points outside the cones of C have different types over C");
  });
}

void suite_cone_indisc(Ctx& ctx) {
  each_structure(Flavor::kPointed, ctx.max_size, false, [&](const MixedStructure& s) {
    const auto u = iota_ids(s.size());
    const int g = s.point();
    for (std::uint32_t cm = 0; cm < (1u << s.size()); ++cm) {
      const NodeSet c = mask_ids(cm, u);
      std::vector<int> outside;
      for (int x = 0; x < s.size(); ++x) {
        if (s.lt(g, x) && !in_cone_of(s, g, c, x)) outside.push_back(x);
      }
      for (size_t i = 0; i < outside.size(); ++i) {
        for (size_t j = i + 1; j < outside.size(); ++j) {
          const int a = outside[i], b = outside[j];
          ctx.check(s, cone_indisc_check(s, c, a, b), [&] {
            return Json{{"check", "cone-indisc"}, {"c", c}, {"a", a}, {"b", b}};
          });
        }
      }
    }
  });
}

Msg semibranch_indisc_check(const MixedStructure& s, const NodeSet& c, int a, int b) {
  return guarded([&]() -> Msg {
    if (!s.in_branch(a) || !s.in_branch(b)) return std::nullopt;
    std::vector<int> ta(c.begin(), c.end());
    std::vector<int> tb = ta;
    ta.push_back(a);
    tb.push_back(b);
    const bool types = qf_type(s, ta) == qf_type(s, tb);
    NodeSet pc;
    for (int x : c) pc.push_back(s.project(x));
    pc = make_set(pc);
    bool order = true;
    for (int p : pc) {
      order = order && s.leq(a, p) == s.leq(b, p) && s.leq(p, a) == s.leq(p, b);
    }
    if (types == order) return std::nullopt;
    return std::string(types ? "equal types over C but different order over pi(C)"
                             : "same order over pi(C) but different types over C");
  });
}

void suite_semibranch_indisc(Ctx& ctx) {
  each_structure(Flavor::kSemibranched, ctx.max_size, false, [&](const MixedStructure& s) {
    const auto u = iota_ids(s.size());
    std::vector<int> gamma;
    for (int x = 0; x < s.size(); ++x) {
      if (s.in_branch(x)) gamma.push_back(x);
    }
    for (std::uint32_t cm = 0; cm < (1u << s.size()); ++cm) {
      const NodeSet c = mask_ids(cm, u);
      for (size_t i = 0; i < gamma.size(); ++i) {
        for (size_t j = i + 1; j < gamma.size(); ++j) {
          const int a = gamma[i], b = gamma[j];
          ctx.check(s, semibranch_indisc_check(s, c, a, b), [&] {
            return Json{{"check", "semibranch-indisc"}, {"c", c}, {"a", a}, {"b", b}};
          });
        }
      }
    }
  });
}

Msg semibranch_classify_check(const MixedStructure& s, const NodeSet& g) {
  return guarded([&]() -> Msg {
    if (g.empty()) return std::nullopt;
    for (int x : g) {
      for (int y : g) {
        if (!s.comparable(x, y)) return std::nullopt;
      }
      for (int y = 0; y < s.size(); ++y) {
        if (s.leq(y, x) && !set_contains(g, y)) return std::nullopt;
      }
    }
    int top = g.front();
    for (int x : g) {
      if (s.lt(top, x)) top = x;
    }
    NodeSet below;
    for (int y = 0; y < s.size(); ++y) {
      if (s.leq(y, top)) below.push_back(y);
    }
    bool maximal = true;
    for (int y = 0; y < s.size() && maximal; ++y) {
      if (set_contains(g, y)) continue;
      bool fits = true;
      for (int x : g) fits = fits && s.comparable(x, y);
      if (fits) maximal = false;
    }
    if (g != below && !maximal) {
      return std::string("semibranch is neither a branch nor T_{<=top}");
    }
    if (g != below) return std::string("finite semibranch differs from T_{<=top}");
    if (maximal != s.children(top).empty()) {
      return std::string("branch exactly when the top is a leaf fails");
    }
    return std::nullopt;
  });
}

void suite_semibranch_classify(Ctx& ctx) {
  each_structure(Flavor::kPlain, ctx.max_size, false, [&](const MixedStructure& s) {
    const auto u = iota_ids(s.size());
    for (std::uint32_t gm = 1; gm < (1u << s.size()); ++gm) {
      const NodeSet g = mask_ids(gm, u);
      ctx.check(s, semibranch_classify_check(s, g), [&] {
        return Json{{"check", "semibranch-classify"}, {"set", g}};
      });
    }
  });
}

Msg semibranch_space_check(const MixedStructure& s) {
  return guarded([&]() -> Msg {
    SemibranchSpace sp = semibranch_space(s);
    if (!sp.bijective) return std::string("map reported not bijective");
    if (static_cast<int>(sp.semibranches.size()) != s.size()) {
      return std::string("number of semibranches differs from the number of nodes");
    }
    std::vector<bool> hit(sp.semibranches.size(), false);
    for (int g = 0; g < s.size(); ++g) {
      const int i = sp.index_of_node.at(g);
      if (i < 0 || i >= static_cast<int>(hit.size()) || hit[i]) {
        return "node " + std::to_string(g) + " maps outside or onto a used semibranch";
      }
      hit[i] = true;
      NodeSet below;
      for (int y = 0; y < s.size(); ++y) {
        if (s.leq(y, g)) below.push_back(y);
      }
      if (sp.semibranches[i] != below) {
        return "node " + std::to_string(g) + " does not map to T_{<=g}";
      }
    }
    return std::nullopt;
  });
}

void suite_semibranch_space(Ctx& ctx) {
  each_structure(Flavor::kPlain, ctx.max_size, false, [&](const MixedStructure& s) {
    ctx.check(s, semibranch_space_check(s), [] {
      return Json{{"check", "semibranch-space"}};
    });
  });
}

// Relation lemmas

void suite_swir(Ctx& ctx, Flavor flavor, RelationKind kind, bool edges,
                int random_steps) {
  const Relation rel{kind, kNone};
  axioms_exhaustive(ctx, structures_upto(flavor, ctx.max_size, edges), rel);
  // Types in the relation's own language; edges are part of it only for
  // the mixed relations.
  const bool mixed = kind == RelationKind::kMixedCone ||
                     kind == RelationKind::kMixedSemibranch;
  type_axioms(ctx, structures_upto(flavor, ctx.max_size, mixed && edges), rel);
  axioms_randomized(ctx, flavor, edges, rel, random_steps);
}

void suite_indep_generation(Ctx& ctx) {
  auto run = [&](Flavor f, RelationKind kind) {
    const Relation rel{kind, kNone};
    MemoCache cache;
    each_structure(f, ctx.max_size, false, [&](const MixedStructure& s) {
      RelTable t(s, rel, iota_ids(s.size()), shared_memo(cache, s, rel));
      for (const Triple& tr : disjoint_triples(s.size())) {
        ++ctx.instances;
        bool ok = true;
        Msg exc = guarded([&]() -> Msg {
          ok = axiom_holds(t, Ax::kGeneration, tr.a, tr.b, tr.c, 0, 0, {});
          return std::nullopt;
        });
        if (exc || !ok) {
          ctx.fail(s, axiom_data(t, Ax::kGeneration, tr.a, tr.b, tr.c, 0, 0, {}),
                   exc ? *exc : axiom_message(Ax::kGeneration, t, tr.a, tr.b, tr.c));
        }
      }
    });
  };
  run(Flavor::kPointed, RelationKind::kCone);
  run(Flavor::kSemibranched, RelationKind::kSemibranch);
}

Msg easy_indep_check(const MixedStructure& s, const NodeSet& a, const NodeSet& b,
                     const NodeSet& c) {
  return guarded([&]() -> Msg {
    const int g = s.point();
    bool hyp = true;
    for (int x : a) {
      for (int y : b) {
        if (s.leq(g, x)) {
          hyp = hyp && s.leq(s.meet(x, y), g);
        } else {
          hyp = hyp && s.lt(s.meet(x, g), s.meet(y, g));
        }
      }
    }
    if (hyp != easy_indep_sufficient(s, g, a, b)) {
      return std::string("hypothesis evaluation disagrees with its definition");
    }
    if (!hyp || cone_indep(s, g, a, b, c).independent) return std::nullopt;
    return std::string("hypothesis holds but A is not independent from B over C");
  });
}

void suite_easy_indep(Ctx& ctx) {
  each_structure(Flavor::kPointed, ctx.max_size, false, [&](const MixedStructure& s) {
    const auto u = iota_ids(s.size());
    for (const Triple& tr : disjoint_triples(s.size())) {
      const NodeSet a = mask_ids(tr.a, u), b = mask_ids(tr.b, u), c = mask_ids(tr.c, u);
      ctx.check(s, easy_indep_check(s, a, b, c), [&] {
        return Json{{"check", "easy-indep"}, {"a", a}, {"b", b}, {"c", c}};
      });
    }
  });
}

Msg base_irrelevance_check(const MixedStructure& s, const NodeSet& a,
                           const NodeSet& b, const NodeSet& c) {
  return guarded([&]() -> Msg {
    if (c.empty()) return std::nullopt;
    const bool first = cone_indep(s, c.front(), a, b, c).independent;
    for (int g : c) {
      if (cone_indep(s, g, a, b, c).independent != first) {
        return "verdict at base point " + std::to_string(g) + " differs from " +
               std::to_string(c.front());
      }
    }
    return std::nullopt;
  });
}

void suite_base_irrelevance(Ctx& ctx) {
  each_structure(Flavor::kPlain, ctx.max_size, false, [&](const MixedStructure& s) {
    const auto u = iota_ids(s.size());
    for (const Triple& tr : disjoint_triples(s.size())) {
      if (tr.c == 0) continue;
      const NodeSet a = mask_ids(tr.a, u), b = mask_ids(tr.b, u), c = mask_ids(tr.c, u);
      ctx.check(s, base_irrelevance_check(s, a, b, c), [&] {
        return Json{{"check", "base-irrelevance"}, {"a", a}, {"b", b}, {"c", c}};
      });
    }
  });
}

NodeSet cones_of(const MixedStructure& s, int g, const NodeSet& x) {
  NodeSet out;
  for (int v = 0; v < s.size(); ++v) {
    if (in_cone_of(s, g, x, v)) out.push_back(v);
  }
  return out;
}

Msg cone_lemma_check(const MixedStructure& s, const NodeSet& a, const NodeSet& b,
                     const NodeSet& c) {
  return guarded([&]() -> Msg {
    const int g = s.point();
    if (!cone_indep(s, g, a, b, c).independent) return std::nullopt;
    if (set_intersection(cones_of(s, g, set_union(a, c)), cones_of(s, g, set_union(b, c))) ==
        cones_of(s, g, c)) {
      return std::nullopt;
    }
    return std::string("independent but cone(AC) & cone(BC) != cone(C)");
  });
}

void suite_cone_lemma(Ctx& ctx) {
  each_structure(Flavor::kPointed, ctx.max_size, false, [&](const MixedStructure& s) {
    const auto u = iota_ids(s.size());
    for (const Triple& tr : disjoint_triples(s.size())) {
      const NodeSet a = mask_ids(tr.a, u), b = mask_ids(tr.b, u), c = mask_ids(tr.c, u);
      ctx.check(s, cone_lemma_check(s, a, b, c), [&] {
        return Json{{"check", "cone-lemma"}, {"a", a}, {"b", b}, {"c", c}};
      });
    }
  });
}

// s is semibranched with tip g and Gamma = T_{<=g}.
Msg semibranch_cone_check(const MixedStructure& s, const NodeSet& a, const NodeSet& b,
                          const NodeSet& c) {
  return guarded([&]() -> Msg {
    const int g = s.tip();
    MixedStructure pointed(Flavor::kPointed, s.parents(), {}, g);
    const bool cone = cone_indep(pointed, g, a, b, c).independent;
    if (cone != semibranch_indep(s, a, b, set_union(c, {g})).independent) {
      return std::string("cone verdict differs from the semibranch verdict over C+gamma");
    }
    for (int x : meet_closure(s, set_union(a, c))) {
      if (s.leq(g, x)) return std::nullopt;
    }
    if (cone != semibranch_indep(s, a, b, c).independent) {
      return std::string("nothing of <AC> above gamma, yet verdicts over C differ");
    }
    return std::nullopt;
  });
}

void suite_semibranch_cone_equiv(Ctx& ctx) {
  each_structure(Flavor::kSemibranched, ctx.max_size, false, [&](const MixedStructure& s) {
    const auto u = iota_ids(s.size());
    for (const Triple& tr : disjoint_triples(s.size())) {
      const NodeSet a = mask_ids(tr.a, u), b = mask_ids(tr.b, u), c = mask_ids(tr.c, u);
      ctx.check(s, semibranch_cone_check(s, a, b, c), [&] {
        return Json{{"check", "semibranch-cone-equiv"}, {"a", a}, {"b", b}, {"c", c}};
      });
    }
  });
}

Relation tree_side(const Relation& mix) {
  return {mix.kind == RelationKind::kMixedCone ? RelationKind::kCone
                                               : RelationKind::kSemibranch,
          mix.gamma};
}

Msg mix_free_check(const MixedStructure& s, const Relation& rel, const NodeSet& a,
                   const NodeSet& b, const NodeSet& c, const NodeSet& d) {
  return guarded([&]() -> Msg {
    const NodeSet cc = relation_closure(s, rel, c);
    if (set_intersection(relation_closure(s, rel, set_union(a, c)),
                         relation_closure(s, rel, set_union(b, c))) != cc) {
      return std::nullopt;
    }
    if (!independent(s, rel, a, d, set_union(b, c)).independent) return std::nullopt;
    if (!independent(s, tree_side(rel), b, d, c).independent) return std::nullopt;
    if (independent(s, rel, a, d, c).independent) return std::nullopt;
    return std::string("hypotheses hold but A is not independent from D over C");
  });
}

void suite_mix_free(Ctx& ctx) {
  for (auto [f, kind] : {std::pair{Flavor::kPointed, RelationKind::kMixedCone},
                         std::pair{Flavor::kSemibranched, RelationKind::kMixedSemibranch}}) {
    const Relation rel{kind, kNone};
    each_structure(f, ctx.max_size, true, [&](const MixedStructure& s) {
      const int n = s.size();
      const auto u = iota_ids(n);
      RelTable mix(s, rel, u);
      RelTable tree(s, tree_side(rel), u);
      int total = 1;
      for (int i = 0; i < n; ++i) total *= 5;
      for (int code = 0; code < total; ++code) {
        std::uint32_t A = 0, B = 0, C = 0, D = 0;
        for (int i = 0, r = code; i < n; ++i, r /= 5) {
          switch (r % 5) {
            case 1: A |= 1u << i; break;
            case 2: B |= 1u << i; break;
            case 3: C |= 1u << i; break;
            case 4: D |= 1u << i; break;
            default: break;
          }
        }
        ++ctx.instances;
        bool bad = false;
        Msg exc = guarded([&]() -> Msg {
          if (set_intersection(mix.clo(A | C), mix.clo(B | C)) != mix.clo(C)) return std::nullopt;
          bad = mix.indep(A, D, B | C) && tree.indep(B, D, C) && !mix.indep(A, D, C);
          return std::nullopt;
        });
        if (exc || bad) {
          const NodeSet a = mask_ids(A, u), b = mask_ids(B, u), c = mask_ids(C, u),
                        d = mask_ids(D, u);
          Json data = relation_json(rel);
          data["check"] = "mix-free";
          data["a"] = a;
          data["b"] = b;
          data["c"] = c;
          data["d"] = d;
          ctx.fail(s, data, exc ? *exc : *mix_free_check(s, rel, a, b, c, d));
        }
      }
    });
  }
}

// Right extension by the recipe: normality, existence, left extension over
// bc, transport of b' along a1 -> a, transitivity.
Msg left_to_right_check(Approximation& appr, const Relation& rel,
                        const std::vector<int>& a, const NodeSet& b, const NodeSet& c,
                        const NodeSet& bprime) {
  return guarded([&]() -> Msg {
    const NodeSet as = make_set(a);
    if (!set_subset(b, bprime)) return std::nullopt;
    if (!independent(appr.current(), rel, as, b, c).independent) return std::nullopt;
    const NodeSet bc = set_union(b, c);
    const NodeSet bpc = set_union(bprime, bc);
    if (!independent(appr.current(), rel, as, bc, c).independent) {
      return std::string("normality step fails");
    }
    if (!independent(appr.current(), rel, {}, bpc, bc).independent) {
      return std::string("existence step fails");
    }
    const std::vector<int> a1 = extension_witness_tuple(appr, a, bc, bpc, rel);
    if (!independent(appr.current(), rel, make_set(a1), bpc, bc).independent) {
      return std::string("left extension is not independent");
    }
    std::vector<int> from = a1;
    std::vector<int> to = a;
    from.insert(from.end(), bc.begin(), bc.end());
    to.insert(to.end(), bc.begin(), bc.end());
    PartialIso p = match_generated(appr.current(), from, appr.current(), to);
    if (!is_partial_iso(appr.current(), p)) {
      return std::string("left extension changed the type over bc");
    }
    PartialIso q = extend_partial_iso(appr, p, std::vector<int>(bprime.begin(), bprime.end()));
    std::vector<int> b2;
    for (int x : bprime) b2.push_back(q.at(x));
    const MixedStructure& s = appr.current();
    std::vector<int> lhs(bc.begin(), bc.end());
    std::vector<int> rhs = lhs;
    lhs.insert(lhs.end(), bprime.begin(), bprime.end());
    rhs.insert(rhs.end(), b2.begin(), b2.end());
    if (qf_type(s, lhs) != qf_type(s, rhs)) {
      return std::string("b'' does not have the type of b' over bc");
    }
    if (!independent(s, rel, as, set_union(make_set(b2), bc), c).independent) {
      return std::string("a is not independent from b'' over c");
    }
    return std::nullopt;
  });
}

NodeSet sample_nodes(std::mt19937_64& rng, int n, int k) {
  std::uniform_int_distribution<int> node(0, n - 1);
  NodeSet out;
  while (static_cast<int>(out.size()) < std::min(k, n)) out = set_union(out, {node(rng)});
  return out;
}

void suite_left_to_right(Ctx& ctx) {
  if (ctx.trials <= 0) return;
  const int k = std::max(1, ctx.max_size);
  std::mt19937_64 rng(ctx.seed);
  std::uniform_int_distribution<int> size(1, k);
  const std::array<std::pair<Flavor, RelationKind>, 2> kinds{
      {{Flavor::kPointed, RelationKind::kMixedCone},
       {Flavor::kSemibranched, RelationKind::kMixedSemibranch}}};
  std::array<MixedStructure, 2> hosts;
  for (int trial = 0; trial < ctx.trials; ++trial) {
    const int which = trial % 2;
    const auto [flavor, kind] = kinds[which];
    BuildOptions o;
    o.flavor = flavor;
    o.relational = true;
    o.steps = 60;
    o.seed = ctx.seed + static_cast<std::uint64_t>(trial);
    // Fresh hosts every 50 trials keep them small.
    if (trial % 50 < 2) hosts[which] = build_approximation(o).current();
    const Relation rel{kind, kNone};
    Approximation work(o, hosts[which]);
    const int n = work.current().size();
    const NodeSet c = sample_nodes(rng, n, size(rng));
    const NodeSet b = set_union(c, sample_nodes(rng, n, size(rng)));
    const NodeSet a0 = sample_nodes(rng, n, size(rng));
    Json data = relation_json(rel);
    data["b"] = b;
    data["c"] = c;
    data["build_seed"] = o.seed;
    std::vector<int> a;
    Msg exc = guarded([&]() -> Msg {
      a = extension_witness_tuple(work, std::vector<int>(a0.begin(), a0.end()), c, b, rel);
      return std::nullopt;
    });
    if (exc) {
      data["check"] = "extension-witness";
      data["a"] = std::vector<int>(a0.begin(), a0.end());
      ctx.fail(hosts[which], data, *exc);
    }
    const NodeSet bprime = set_union(b, sample_nodes(rng, work.current().size(), size(rng)));
    const std::uint64_t rng_seed = rng();
    data["check"] = "left-to-right-ext";
    data["a"] = a;
    data["bprime"] = bprime;
    data["rng_seed"] = rng_seed;
    const MixedStructure snapshot = work.current();
    Approximation chk(o, snapshot);
    chk.rng().seed(rng_seed);
    ctx.check(snapshot, left_to_right_check(chk, rel, a, b, c, bprime),
              [&] { return data; });
    hosts[which] = chk.current();
  }
}

Msg replay_left_to_right(const MixedStructure& s, const Json& d) {
  BuildOptions o;
  o.flavor = s.flavor();
  o.relational = s.relational();
  o.seed = d.at("build_seed").get<std::uint64_t>();
  Approximation appr(o, s);
  appr.rng().seed(d.at("rng_seed").get<std::uint64_t>());
  return left_to_right_check(appr, relation_from(d), json_ids(d.at("a")),
                             json_set(d.at("b")), json_set(d.at("c")),
                             json_set(d.at("bprime")));
}

Msg replay_extension_witness(const MixedStructure& s, const Json& d) {
  BuildOptions o;
  o.flavor = s.flavor();
  o.relational = s.relational();
  o.seed = d.at("build_seed").get<std::uint64_t>();
  Approximation appr(o, s);
  return guarded([&]() -> Msg {
    extension_witness_tuple(appr, json_ids(d.at("a")), json_set(d.at("c")),
                            json_set(d.at("b")), relation_from(d));
    return std::nullopt;
  });
}

// Amalgamation

Msg amalgam_check(const MixedStructure& c, const MixedStructure& a,
                  const std::vector<int>& f, const MixedStructure& b,
                  const std::vector<int>& g, bool mixed) {
  return guarded([&]() -> Msg {
    AmalgamResult r = mixed ? amalgamate_mixed(c, a, f, b, g) : amalgamate_tree(c, a, f, b, g);
    const auto errors = validate_structure(r.amalgam);
    if (!errors.empty()) return "amalgam invalid: " + errors.front();
    const AmalgamCertificate cert = certify_amalgam(c, a, f, b, g, r);
    if (!cert.left_ok) return std::string("left map is not an embedding");
    if (!cert.right_ok) return std::string("right map is not an embedding");
    if (!cert.commutes) return std::string("square does not commute");
    if (!cert.ok()) return std::string("certificate fails");
    NodeSet left(r.left.begin(), r.left.end());
    NodeSet right(r.right.begin(), r.right.end());
    NodeSet base(r.base.begin(), r.base.end());
    if (set_intersection(make_set(left), make_set(right)) != make_set(base)) {
      return std::string("images meet outside the base");
    }
    return std::nullopt;
  });
}

void suite_amalgam_strong(Ctx& ctx) {
  for (bool mixed : {false, true}) {
    for (Flavor fl : {Flavor::kPlain, Flavor::kPointed, Flavor::kSemibranched}) {
      auto all = structures_upto(fl, ctx.max_size, mixed);
      std::vector<MixedStructure> bases = all;
      if (fl != Flavor::kPointed) {
        bases.insert(bases.begin(), MixedStructure(fl, {}, {}, kNone, kNone, mixed));
      }
      for (const auto& c : bases) {
        std::vector<std::vector<std::vector<int>>> into(all.size());
        for (size_t i = 0; i < all.size(); ++i) {
          if (all[i].size() >= c.size()) into[i] = embeddings_between(c, all[i]);
        }
        for (size_t i = 0; i < all.size(); ++i) {
          const auto& a = all[i];
          const auto& fs = into[i];
          for (size_t j = 0; j < all.size(); ++j) {
            const auto& b = all[j];
            const auto& gs = into[j];
            for (const auto& f : fs) {
              for (const auto& g : gs) {
                ctx.check(a, amalgam_check(c, a, f, b, g, mixed), [&] {
                  return Json{{"check", "amalgam-strong"}, {"mixed", mixed},
                              {"c", structure_to_json(c)}, {"b", structure_to_json(b)},
                              {"f", f}, {"g", g}};
                });
              }
            }
          }
        }
      }
    }
  }
}

// Limit

Msg generic_mix_check(const MixedStructure& s, int samples, std::uint64_t seed,
                      int max_size) {
  return guarded([&]() -> Msg {
    BuildOptions o;
    o.flavor = s.flavor();
    o.relational = s.relational();
    Approximation appr(o, s);
    MixReport r = check_generic_mix(appr, samples, seed, max_size);
    if (r.missing == 0) return std::nullopt;
    return std::to_string(r.missing) + " of " + std::to_string(r.samples) +
           " sampled mixes are not realized";
  });
}

void suite_generic_mix(Ctx& ctx) {
  if (ctx.trials <= 0) return;
  const int k = std::clamp(ctx.max_size, 1, 3);
  for (Flavor f : {Flavor::kPlain, Flavor::kPointed, Flavor::kSemibranched}) {
    BuildOptions o;
    o.flavor = f;
    o.relational = true;
    o.steps = 500;
    o.seed = ctx.seed;
    Approximation appr = build_approximation(o);
    const MixedStructure& s = appr.current();
    MixReport r = check_generic_mix(appr, ctx.trials, ctx.seed, k);
    ctx.instances += static_cast<std::uint64_t>(r.samples);
    if (r.missing > 0) {
      ctx.fail(s, Json{{"check", "generic-mix"}, {"samples", ctx.trials},
                       {"seed", ctx.seed}, {"max_size", k}},
               *generic_mix_check(s, ctx.trials, ctx.seed, k));
    }
  }
}

// Automorphisms

Msg dichotomy_check(const MixedStructure& s, const std::vector<int>& perm) {
  return guarded([&]() -> Msg {
    FiniteAutomorphism alpha{s, perm};
    DichotomyResult r = fixed_chain_dichotomy(alpha);
    if (!replay_dichotomy(alpha, r)) return std::string("certificate does not replay");
    bool fixed_leaf = false;
    for (int v = 0; v < s.size(); ++v) {
      fixed_leaf = fixed_leaf || (s.children(v).empty() && perm[v] == v);
    }
    if (r.kind == DichotomyKind::kBranchFixed) {
      if (r.chain.empty() || r.chain.front() != s.root()) {
        return std::string("branch does not start at the root");
      }
      for (size_t i = 1; i < r.chain.size(); ++i) {
        if (s.parent(r.chain[i]) != r.chain[i - 1]) return std::string("branch is not a path");
      }
      if (!s.children(r.chain.back()).empty()) return std::string("branch does not end in a leaf");
      NodeSet chain = make_set(r.chain);
      NodeSet image;
      for (int x : chain) image.push_back(perm[x]);
      if (make_set(image) != chain) return std::string("branch is not fixed setwise");
      return std::nullopt;
    }
    if (fixed_leaf) return std::string("fan reported although a branch is fixed");
    for (int a = 0; a < s.size(); ++a) {
      if (s.leq(r.apex, a) && s.meet(a, perm[a]) != r.apex) {
        return "not a fan above " + std::to_string(r.apex) + " at " + std::to_string(a);
      }
    }
    return std::nullopt;
  });
}

void suite_dichotomy(Ctx& ctx) {
  auto run = [&](int max_n, bool edges) {
    each_structure(Flavor::kPlain, max_n, edges, [&](const MixedStructure& s) {
      for (const auto& perm : structure_automorphisms(s)) {
        ctx.check(s, dichotomy_check(s, perm), [&] {
          return Json{{"check", "dichotomy"}, {"perm", perm}};
        });
      }
    });
  };
  run(ctx.max_size, false);
  run(std::min(ctx.max_size, 4), true);
}

Msg fan_power_check(const MixedStructure& s, const std::vector<int>& perm, int g, int k) {
  return guarded([&]() -> Msg {
    FiniteAutomorphism alpha{s, perm};
    FanReport rep = is_fan_above(alpha, g, k);
    FiniteAutomorphism pk = power(alpha, k);
    bool direct = true;
    for (int a = 0; a < s.size(); ++a) {
      if (s.leq(g, a) && s.meet(a, pk.perm[a]) != g) direct = false;
    }
    if (rep.fan.size() != static_cast<size_t>(k) || rep.fan.back() != direct) {
      return "fan flag of power " + std::to_string(k) + " disagrees with the definition";
    }
    // Fixes g and leaves no cone at g invariant.
    bool by_cones = pk.perm[g] == g;
    if (by_cones) {
      for (const NodeSet& cone : cones_at(s, g)) {
        NodeSet image;
        for (int x : cone) image.push_back(pk.perm[x]);
        if (make_set(image) == cone) by_cones = false;
      }
    }
    if (by_cones != direct) {
      return "power " + std::to_string(k) + ": invariant-cone criterion disagrees";
    }
    return std::nullopt;
  });
}

// Every power up to the order is a fan exactly when g is fixed with nothing
// above it.
Msg fan_all_powers_check(const MixedStructure& s, const std::vector<int>& perm, int g) {
  return guarded([&]() -> Msg {
    FiniteAutomorphism alpha{s, perm};
    const long long order = automorphism_order(alpha);
    FanReport rep = is_fan_above(alpha, g, static_cast<int>(order));
    const bool all = std::all_of(rep.fan.begin(), rep.fan.end(), [](bool b) { return b; });
    const bool expected = perm[g] == g && rep.vacuous;
    if (all == expected) return std::nullopt;
    return std::string("all powers up to the order are fans, yet cones exist above g");
  });
}

void suite_fan_power(Ctx& ctx) {
  each_structure(Flavor::kPlain, ctx.max_size, false, [&](const MixedStructure& s) {
    for (const auto& perm : structure_automorphisms(s)) {
      const long long order = automorphism_order(FiniteAutomorphism{s, perm});
      for (int g = 0; g < s.size(); ++g) {
        for (int k = 1; k <= order; ++k) {
          ctx.check(s, fan_power_check(s, perm, g, k), [&] {
            return Json{{"check", "fan-power"}, {"perm", perm}, {"g", g}, {"k", k}};
          });
        }
        ctx.check(s, fan_all_powers_check(s, perm, g), [&] {
          return Json{{"check", "fan-all-powers"}, {"perm", perm}, {"g", g}};
        });
      }
    }
  });
}

// Graph-language type of an injective tuple: adjacency of every pair.
std::vector<int> graph_type(const Graph& g, const std::vector<int>& t) {
  std::vector<int> out;
  for (size_t i = 0; i < t.size(); ++i) {
    for (size_t j = i + 1; j < t.size(); ++j) {
      out.push_back(t[i] == t[j] ? 2 : g.has_edge(t[i], t[j]) ? 1 : 0);
    }
  }
  return out;
}

// k-ary determination: equal types on every sub-tuple of length <= k, yet
// different full types.
bool determined_fails(const Graph& g, const std::vector<int>& x,
                      const std::vector<int>& y, int k) {
  const int n = static_cast<int>(x.size());
  for (std::uint32_t sub = 1; sub < (1u << n); ++sub) {
    if (std::popcount(sub) > k) continue;
    std::vector<int> xs, ys;
    for (int i = 0; i < n; ++i) {
      if (sub >> i & 1u) {
        xs.push_back(x[i]);
        ys.push_back(y[i]);
      }
    }
    if (graph_type(g, xs) != graph_type(g, ys)) return false;
  }
  return graph_type(g, x) != graph_type(g, y);
}

Msg binary_check(const MixedStructure& s, const std::vector<int>& x,
                 const std::vector<int>& y) {
  return guarded([&]() -> Msg {
    if (!determined_fails(graph_reduct(s), x, y, 2)) return std::nullopt;
    return std::string("2-types agree but the tuples have different types");
  });
}

// Violation: no sampled pair separates 1-types from the pair type.
Msg unary_none_check(const MixedStructure& s, const Json& pairs) {
  return guarded([&]() -> Msg {
    const Graph g = graph_reduct(s);
    for (const auto& p : pairs) {
      if (determined_fails(g, json_ids(p.at(0)), json_ids(p.at(1)), 1)) return std::nullopt;
    }
    return "none of " + std::to_string(pairs.size()) +
           " sampled pairs shows the layer is not unary";
  });
}

std::vector<int> sample_tuple(std::mt19937_64& rng, int n, int len) {
  std::uniform_int_distribution<int> node(0, n - 1);
  std::vector<int> t;
  while (static_cast<int>(t.size()) < len) {
    int v = node(rng);
    if (std::find(t.begin(), t.end(), v) == t.end()) t.push_back(v);
  }
  return t;
}

void suite_unary_check(Ctx& ctx) {
  if (ctx.trials <= 0) return;
  BuildOptions o;
  o.flavor = Flavor::kPlain;
  o.relational = true;
  o.steps = 200;
  o.seed = ctx.seed;
  Approximation appr = build_approximation(o);
  const MixedStructure& s = appr.current();
  const Graph g = graph_reduct(s);
  std::mt19937_64 rng(ctx.seed);
  const int k = std::clamp(ctx.max_size, 2, std::min(6, s.size()));
  std::uniform_int_distribution<int> len(2, k);
  Json pairs = Json::array();
  for (int t = 0; t < ctx.trials; ++t) {
    // Pairs for the unary test, longer tuples for the binary one.
    const std::vector<int> x = sample_tuple(rng, s.size(), 2);
    const std::vector<int> y = sample_tuple(rng, s.size(), 2);
    pairs.push_back({x, y});
    ++ctx.instances;
    const int m = len(rng);
    const std::vector<int> xl = sample_tuple(rng, s.size(), m);
    const std::vector<int> yl = sample_tuple(rng, s.size(), m);
    ctx.check(s, binary_check(s, xl, yl), [&] {
      return Json{{"check", "binary"}, {"x", xl}, {"y", yl}};
    });
  }
  if (Msg m = unary_none_check(s, pairs)) {
    ctx.fail(s, Json{{"check", "unary-none"}, {"pairs", pairs}}, *m);
  }
}

// Registry

struct SuiteEntry {
  SuiteInfo info;
  std::function<void(Ctx&)> run;
};

const std::vector<SuiteEntry>& registry() {
  static const std::vector<SuiteEntry> kSuites = [] {
    std::vector<SuiteEntry> v;
    auto add = [&](std::string id, std::string anchor, std::string mode, int size,
                   int trials, std::function<void(Ctx&)> fn) {
      v.push_back({{std::move(id), std::move(anchor), std::move(mode), size, trials},
                   std::move(fn)});
    };
    add("closure-bound",
        "one-point step of generated sets: |<X>_meet| <= 2|X|-1, |<X>_Gamma| <= 2|X|+1",
        "exhaustive", 7, 0, suite_closure_bound);
    add("three-points", "two of the meets a^b, a^c, b^c equal a^b^c", "exhaustive", 7, 0,
        suite_three_points);
    add("four-points", "a^c = b^c and a^d != b^d imply a^c = d^c", "exhaustive", 7, 0,
        suite_four_points);
    add("cone-indisc", "points above gamma outside cone_gamma(C) share their type over C",
        "exhaustive", 6, 0, suite_cone_indisc);
    add("semibranch-indisc",
        "points of Gamma have equal types over C iff equal order types over pi(C)",
        "exhaustive", 7, 0, suite_semibranch_indisc);
    add("semibranch-classify", "a semibranch is a branch or T_{<=gamma}", "exhaustive", 7, 0,
        suite_semibranch_classify);
    add("semibranch-space", "gamma -> T_{<=gamma} is a bijection onto the semibranches",
        "exhaustive", 7, 0, suite_semibranch_space);
    add("swir-cone",
        "cone independence: invariance, monotonicity, normality, existence, finite "
        "character, base monotonicity, transitivity, qf stationarity, reflexivity, "
        "independent generation",
        "exhaustive+randomized", 5, 10000, [](Ctx& c) {
          suite_swir(c, Flavor::kPointed, RelationKind::kCone, true, 150);
        });
    add("indep-generation", "A indep_C B implies <ABC> = <AC> u <BC>", "exhaustive", 6, 0,
        suite_indep_generation);
    add("easy-indep", "the meet conditions on A, B give A indep^gamma_C B for every C",
        "exhaustive", 6, 0, suite_easy_indep);
    add("base-irrelevance", "cone independence over C does not depend on the base point in C",
        "exhaustive", 6, 0, suite_base_irrelevance);
    add("cone-lemma", "A indep^gamma_C B implies cone(AC) n cone(BC) = cone(C)", "exhaustive",
        6, 0, suite_cone_lemma);
    add("semibranch-cone-equiv",
        "A indep^gamma_C B iff A indep^Gamma_{C gamma} B for Gamma = T_{<=gamma}", "exhaustive",
        6, 0, suite_semibranch_cone_equiv);
    add("swir-semibranch",
        "semibranch independence: the cone axiom list, reflexivity, independent generation",
        "exhaustive+randomized", 6, 10000, [](Ctx& c) {
          suite_swir(c, Flavor::kSemibranched, RelationKind::kSemibranch, false, 150);
        });
    add("mix-swir", "mixing tree and graph relations keeps the stationary weak axioms",
        "exhaustive+randomized", 4, 10000, [](Ctx& c) {
          suite_swir(c, Flavor::kPointed, RelationKind::kMixedCone, true, 150);
          suite_swir(c, Flavor::kSemibranched, RelationKind::kMixedSemibranch, true, 150);
        });
    add("mix-free", "A indep_{BC} D and B indep^1_C D give A indep_C D", "exhaustive", 4, 0,
        suite_mix_free);
    add("left-to-right-ext", "right extension from left extension and the other axioms",
        "randomized", 2, 1000, suite_left_to_right);
    add("amalgam-strong", "amalgams are strong: images meet exactly in the base",
        "exhaustive", 4, 0, suite_amalgam_strong);
    add("generic-mix", "tree and graph types of equal shape are realized jointly",
        "randomized", 2, 10000, suite_generic_mix);
    add("dichotomy", "an automorphism fixes a branch setwise or is a fan", "exhaustive", 6, 0,
        suite_dichotomy);
    add("fan-power", "alpha^n is a fan above gamma, checked power by power", "exhaustive", 6, 0,
        suite_fan_power);
    add("unary-check",
        "n-ary determination over injective tuples; the graph layer is not unary",
        "randomized", 3, 100, suite_unary_check);
    return v;
  }();
  return kSuites;
}

using Replay = std::function<Msg(const MixedStructure&, const Json&)>;

const std::map<std::string, Replay>& replays() {
  static const std::map<std::string, Replay> kReplays = {
      {"closure-bound",
       [](const MixedStructure& s, const Json& d) {
         return closure_bound_check(s, json_set(d.at("x")));
       }},
      {"three-points",
       [](const MixedStructure& s, const Json& d) {
         auto t = json_ids(d.at("tuple"));
         return three_points_check(s, t.at(0), t.at(1), t.at(2));
       }},
      {"four-points",
       [](const MixedStructure& s, const Json& d) {
         auto t = json_ids(d.at("tuple"));
         return four_points_check(s, t.at(0), t.at(1), t.at(2), t.at(3));
       }},
      {"cone-indisc",
       [](const MixedStructure& s, const Json& d) {
         return cone_indisc_check(s, json_set(d.at("c")), d.at("a").get<int>(),
                                  d.at("b").get<int>());
       }},
      {"semibranch-indisc",
       [](const MixedStructure& s, const Json& d) {
         return semibranch_indisc_check(s, json_set(d.at("c")), d.at("a").get<int>(),
                                        d.at("b").get<int>());
       }},
      {"semibranch-classify",
       [](const MixedStructure& s, const Json& d) {
         return semibranch_classify_check(s, json_set(d.at("set")));
       }},
      {"semibranch-space",
       [](const MixedStructure& s, const Json&) { return semibranch_space_check(s); }},
      {"axiom", replay_axiom},
      {"axiom-exception", replay_axiom_exception},
      {"qf-definability",
       [](const MixedStructure&, const Json& d) {
         return definability_check(instance_from(d.at("x")), instance_from(d.at("y")),
                                   relation_from(d));
       }},
      {"qf-stationarity",
       [](const MixedStructure&, const Json& d) {
         return stationarity_check(instance_from(d.at("x")), instance_from(d.at("y")),
                                   relation_from(d));
       }},
      {"embedding-invariance",
       [](const MixedStructure& s, const Json& d) {
         return embedding_check(s, json_set(d.at("x")), json_set(d.at("a")),
                                json_set(d.at("b")), json_set(d.at("c")), relation_from(d));
       }},
      {"easy-indep",
       [](const MixedStructure& s, const Json& d) {
         return easy_indep_check(s, json_set(d.at("a")), json_set(d.at("b")),
                                 json_set(d.at("c")));
       }},
      {"base-irrelevance",
       [](const MixedStructure& s, const Json& d) {
         return base_irrelevance_check(s, json_set(d.at("a")), json_set(d.at("b")),
                                       json_set(d.at("c")));
       }},
      {"cone-lemma",
       [](const MixedStructure& s, const Json& d) {
         return cone_lemma_check(s, json_set(d.at("a")), json_set(d.at("b")),
                                 json_set(d.at("c")));
       }},
      {"semibranch-cone-equiv",
       [](const MixedStructure& s, const Json& d) {
         return semibranch_cone_check(s, json_set(d.at("a")), json_set(d.at("b")),
                                      json_set(d.at("c")));
       }},
      {"mix-free",
       [](const MixedStructure& s, const Json& d) {
         return mix_free_check(s, relation_from(d), json_set(d.at("a")), json_set(d.at("b")),
                               json_set(d.at("c")), json_set(d.at("d")));
       }},
      {"left-to-right-ext", replay_left_to_right},
      {"extension-witness", replay_extension_witness},
      {"amalgam-strong",
       [](const MixedStructure& a, const Json& d) {
         return amalgam_check(structure_from_json(d.at("c")), a, json_ids(d.at("f")),
                              structure_from_json(d.at("b")), json_ids(d.at("g")),
                              d.at("mixed").get<bool>());
       }},
      {"generic-mix",
       [](const MixedStructure& s, const Json& d) {
         return generic_mix_check(s, d.at("samples").get<int>(),
                                  d.at("seed").get<std::uint64_t>(),
                                  d.at("max_size").get<int>());
       }},
      {"dichotomy",
       [](const MixedStructure& s, const Json& d) {
         return dichotomy_check(s, json_ids(d.at("perm")));
       }},
      {"fan-power",
       [](const MixedStructure& s, const Json& d) {
         return fan_power_check(s, json_ids(d.at("perm")), d.at("g").get<int>(),
                                d.at("k").get<int>());
       }},
      {"fan-all-powers",
       [](const MixedStructure& s, const Json& d) {
         return fan_all_powers_check(s, json_ids(d.at("perm")), d.at("g").get<int>());
       }},
      {"binary",
       [](const MixedStructure& s, const Json& d) {
         return binary_check(s, json_ids(d.at("x")), json_ids(d.at("y")));
       }},
      {"unary-none",
       [](const MixedStructure& s, const Json& d) {
         return unary_none_check(s, d.at("pairs"));
       }},
  };
  return kReplays;
}

}  // namespace

const std::vector<SuiteInfo>& list_suites() {
  static const std::vector<SuiteInfo> kInfos = [] {
    std::vector<SuiteInfo> out;
    for (const auto& e : registry()) out.push_back(e.info);
    return out;
  }();
  return kInfos;
}

const SuiteInfo& suite_info(std::string_view id) {
  for (const auto& info : list_suites()) {
    if (info.id == id) return info;
  }
  throw UnknownSuite("unknown suite: " + std::string(id));
}

SuiteReport run_suite(std::string_view id, int max_size, int trials,
                      std::uint64_t seed) {
  const SuiteEntry* entry = nullptr;
  for (const auto& e : registry()) {
    if (e.info.id == id) entry = &e;
  }
  if (!entry) throw UnknownSuite("unknown suite: " + std::string(id));
  if (max_size < 0) throw std::invalid_argument("max_size must be >= 0");
  if (trials < 0) throw std::invalid_argument("trials must be >= 0");
  const auto start = std::chrono::steady_clock::now();
  Ctx ctx;
  ctx.max_size = max_size;
  ctx.trials = trials;
  ctx.seed = seed;
  try {
    entry->run(ctx);
  } catch (const Stop&) {
  }
  SuiteReport r;
  r.suite_id = entry->info.id;
  r.instances_checked = ctx.instances;
  r.counterexample = std::move(ctx.cx);
  r.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.max_size = max_size;
  r.trials = trials;
  r.seed = seed;
  return r;
}

bool replay_counterexample(const Counterexample& cx) {
  const std::string check = cx.data.at("check").get<std::string>();
  auto it = replays().find(check);
  if (it == replays().end()) throw std::invalid_argument("unknown check: " + check);
  const MixedStructure s = structure_from_json(cx.structure);
  Msg m = it->second(s, cx.data);
  return m.has_value() && *m == cx.message;
}

Json counterexample_to_json(const Counterexample& cx) {
  return {{"structure", cx.structure}, {"data", cx.data}, {"message", cx.message}};
}

Counterexample counterexample_from_json(const Json& j) {
  return {j.at("structure"), j.at("data"), j.at("message").get<std::string>()};
}

Json report_to_json(const SuiteReport& r, bool timing) {
  Json j{{"suite", r.suite_id},
         {"instances_checked", r.instances_checked},
         {"passed", r.passed()},
         {"max_size", r.max_size},
         {"trials", r.trials},
         {"seed", r.seed},
         {"counterexample", nullptr}};
  if (r.counterexample) j["counterexample"] = counterexample_to_json(*r.counterexample);
  if (timing) j["elapsed_seconds"] = r.elapsed_seconds;
  return j;
}

}  // namespace treeforge
