// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "treeforge/core.hpp"
#include "treeforge/indep.hpp"
#include "treeforge/limit.hpp"
#include "treeforge/structure.hpp"

namespace treeforge {

// Automorphisms of finite structures

struct FiniteAutomorphism {
  MixedStructure structure;
  std::vector<int> perm;  // perm[v] is the image of v
};

// Empty when perm is an automorphism (tree, edges, point, tip); otherwise the
// failing atom.
std::string automorphism_error(const FiniteAutomorphism& a);
FiniteAutomorphism identity_automorphism(const MixedStructure& s);
// compose(f, g) maps x to f(g(x)). Throws std::invalid_argument when the
// structures differ.
FiniteAutomorphism compose(const FiniteAutomorphism& f, const FiniteAutomorphism& g);
FiniteAutomorphism inverse(const FiniteAutomorphism& f);
FiniteAutomorphism power(const FiniteAutomorphism& f, int k);
// Smallest k >= 1 with f^k = id.
long long automorphism_order(const FiniteAutomorphism& f);
std::vector<FiniteAutomorphism> automorphisms_of(const MixedStructure& s);

enum class DichotomyKind { kBranchFixed, kFan };
std::string_view dichotomy_name(DichotomyKind k);

struct DichotomyResult {
  DichotomyKind kind = DichotomyKind::kBranchFixed;
  std::vector<int> chain;  // maximal fixed chain from the root
  int apex = kNone;        // top of the chain for kFan
  // (a, alpha(a), a ^ alpha(a)) for every a >= apex; empty for kBranchFixed.
  std::vector<std::array<int, 3>> meets;
};

// A setwise fixed chain of a finite tree is fixed pointwise, so the fixed
// points form a rooted subtree. A fixed leaf gives kBranchFixed with the
// smallest-id fixed root path to a leaf; otherwise the greedy smallest-id
// fixed path ends at the fan apex. Throws std::invalid_argument when alpha is
// not an automorphism.
DichotomyResult fixed_chain_dichotomy(const FiniteAutomorphism& alpha);
// Checks chain, maximality, the kind and the apex meets from scratch.
bool replay_dichotomy(const FiniteAutomorphism& alpha, const DichotomyResult& r);

struct FanReport {
  long long order = 1;  // alpha^order = id, so no power past it is a fan
  bool vacuous = false;    // nothing strictly above g
  std::vector<bool> fan;   // fan[k - 1]: a ^ alpha^k(a) = g for all a >= g
};
FanReport is_fan_above(const FiniteAutomorphism& alpha, int g, int max_power);
// Partial version: only points where alpha^k is defined are checked; order
// stays 0.
FanReport is_fan_above(const MixedStructure& s, const PartialIso& alpha, int g,
                       int max_power);

// Partial automorphisms on an approximation

// Points of the branch interior strictly above `upper` move in direction
// upper_dir (+1 up, -1 down) under coherent extension, points strictly below
// `lower` in direction lower_dir. In between nothing is imposed.
struct MotionRule {
  int upper = kNone;
  int upper_dir = 0;
  int lower = kNone;
  int lower_dir = 0;
};

// `word` is applied right to left: "ab" is alpha(beta(node)). Letters:
// a alpha, A alpha^-1, b beta, B beta^-1.
struct Term {
  int node = kNone;
  std::string word;
};

// op: '<' '>' '=' tree order, '~' same cone above the branch top, 'm' / 'M'
// lhs is min / max of the domain snapshot inside the branch interior.
struct TermCheck {
  Term lhs;
  char op = '=';
  Term rhs;
};

struct StageCertificate {
  int stage = 0;
  std::string invariant;  // "i" .. "v", or "hyp"
  std::vector<TermCheck> checks;
  NodeSet domain;    // X_n
  NodeSet image;     // Y_n
  NodeSet required;  // nodes that must sit in X_n and Y_n
  bool ok = false;
  std::string detail;
};

struct PartialAutomorphism {
  PartialIso map;
  MotionRule rule;
  std::vector<StageCertificate> stage_log;

  int at(int x) const;
  int preimage(int y) const;
  PartialIso inverse_map() const;
};

// Validates the map and the rule thresholds. Throws std::invalid_argument.
PartialAutomorphism make_partial_automorphism(const MixedStructure& s,
                                              PartialIso map, MotionRule rule);

// alpha(x) / alpha^-1(y), extending alpha by single steps that obey the rule.
int alpha_image(Approximation& appr, PartialAutomorphism& alpha, int x);
int alpha_preimage(Approximation& appr, PartialAutomorphism& alpha, int y);

using NodePredicate = std::function<bool(const MixedStructure&, int)>;

// Realizes over img(phi) the type of a over dom(phi) moved by phi, with y
// satisfying pred. Existing nodes first, else one growth over
// <img(phi) anchors>. Throws std::runtime_error when nothing fits.
int realize_transported(Approximation& appr, const PartialIso& phi, int a,
                        const NodeSet& anchors, const NodePredicate& pred);

// Adds w to dom(p) by single steps; pred(z) constrains the image of z.
void extend_map(Approximation& appr, PartialIso& p, int w,
                const std::function<NodePredicate(int)>& pred_for);

enum class SaturationKind { kCone, kInterval, kIncreasingUp, kIncreasingDown };
std::string_view saturation_name(SaturationKind k);

struct SaturationRequest {
  SaturationKind kind = SaturationKind::kCone;
  int a = kNone;
  std::vector<int> c;
  std::vector<int> d;
  int b = kNone;   // cone: target cone; increasing: bound
  int b1 = kNone;  // interval bounds, b1 < b2
  int b2 = kNone;
  bool above_b = false;                   // cone: ask for a' > b
  PartialAutomorphism* alpha = nullptr;   // increasing kinds
  bool use_inverse = false;               // increasing kinds: saturate alpha^-1
};

// a' with a'd ≡ ac and the position constraint of the kind; increasing kinds
// also extend alpha to a'. Throws std::invalid_argument when the hypotheses
// fail on the given data.
int realize_saturation(Approximation& appr, const SaturationRequest& req);

struct ConePermutationResult {
  PartialIso map;
  int g = kNone;
  std::vector<int> cone_reps;  // one member per cone at g, listed cones first
  std::vector<int> sigma;      // cone index -> cone index; new cones fixed
  NodeSet declared_fixed;
  std::vector<StageCertificate> stages;  // invariant "action" per stage
};

// Induced action of p on the cones at g given by their representatives;
// kNone where p says nothing, -2 where p splits a cone.
std::vector<int> induced_cone_action(const MixedStructure& s, const PartialIso& p,
                                     int g, const std::vector<int>& reps);

// Back-and-forth over the nodes in id order, `steps` of them. Semibranched
// with g off the branch or Pointed with g the point. Throws
// std::invalid_argument when sigma is not a permutation of the cones at g.
ConePermutationResult realize_cone_permutation(Approximation& appr, int g,
                                               const std::vector<int>& sigma,
                                               int steps);

struct Conjugator {
  int sign = 1;
  FiniteAutomorphism beta;
};

struct FanComposition {
  FiniteAutomorphism product;
  std::vector<int> cone_action;  // induced permutation of cones_at(g)
  FanReport fan;
  // Conjugate counts of the existence statements; carried, never searched.
  static constexpr int kFanConjugates = 8;
  static constexpr int kBranchConjugates = 4;
  static constexpr int kCombinedConjugates = 32;
  static constexpr int kConormalConjugates = 16;
};

// (alpha^e1)^b1 ... (alpha^ek)^bk with x^b = b^-1 x b, applied right to left.
FanComposition compose_and_check_fan(const FiniteAutomorphism& alpha,
                                     const std::vector<Conjugator>& conj, int g,
                                     int max_power);

struct PartialConjugator {
  int sign = 1;
  PartialIso beta;
};
// Same product on partial maps; defined where every factor is.
PartialIso compose_partial(const PartialIso& alpha,
                           const std::vector<PartialConjugator>& conj);

// Staged commutator constructions

enum class Recipe { kC1, kC2, kC3 };
std::string_view recipe_name(Recipe r);
Recipe parse_recipe(std::string_view name);

struct StagedBuildResult {
  Recipe recipe = Recipe::kC1;
  bool branch = true;  // the semibranch is a branch
  PartialAutomorphism alpha;
  PartialIso beta;
  int stages = 0;
  std::map<int, int> a;        // a_k
  std::map<int, int> a_prime;  // C2: a'_k
  std::map<int, int> c;        // c_n
  std::map<int, int> c_prime;  // C2: c'_n
  std::vector<StageCertificate> certificates;
  std::vector<int> w_order;    // enumeration of W used
  std::vector<int> v_order;    // enumeration of V used (not a branch)
  // Window points evaluated under the final product and their images.
  std::vector<std::pair<int, int>> product_values;
  bool product_increasing = true;
  NodeSet window_uncovered;
};

// Runs `stages` stages of the recipe. alpha lives on a Semibranched
// approximation; its rule must show the recipe's hypothesis (C1: increasing
// at both ends; C2: increasing above, decreasing below; C3: orbit_up and
// orbit_down with the rule increasing above orbit_up and decreasing below
// orbit_down). Throws std::invalid_argument when the hypothesis is not shown
// and std::runtime_error naming the invariant when a stage fails.
StagedBuildResult staged_commutator_builder(Approximation& appr, Recipe recipe,
                                            PartialAutomorphism alpha, int stages,
                                            const std::vector<int>& window,
                                            int orbit_up = kNone,
                                            int orbit_down = kNone);

// Re-evaluates a certificate against the final maps.
bool replay_certificate(const MixedStructure& s, const StagedBuildResult& r,
                        const StageCertificate& cert);

// Alpha-orderings

struct OrderCheck {
  std::string condition;  // "i", "ii", "iii", "refine"
  bool ok = true;
  std::vector<int> witness;  // positions
};

struct AlphaOrderResult {
  std::vector<int> tuple;
  int first_above = 0;       // n0: first position above g
  std::vector<int> inserted; // positions of added meets
  std::vector<OrderCheck> certificate;
};

// Reorders the tuple (g dropped, duplicates dropped) and inserts meets so that
// the three ordering conditions and the closure refinement hold. Throws
// std::invalid_argument when alpha does not fix g, is undefined where needed,
// or the cones of the tuple cannot be ordered.
AlphaOrderResult alpha_order(const MixedStructure& s, const PartialIso& alpha,
                             const std::vector<int>& tuple, int g);
AlphaOrderResult alpha_order(const FiniteAutomorphism& alpha,
                             const std::vector<int>& tuple, int g);
std::vector<OrderCheck> check_alpha_order(const MixedStructure& s,
                                          const PartialIso& alpha,
                                          const std::vector<int>& tuple, int g);

// Move-maximality witnesses

enum class MoveSide { kRight, kLeft };

struct MoveWitness {
  std::vector<int> a;
  std::vector<int> image;  // alpha(a)
  bool algebraic = false;
  int attempts = 0;
  IndepVerdict verdict;
  QfTypeCode type;  // qf type of c ++ a
};

// A realization a of the type of `p` over c with a independent from alpha(a)
// over c (right) or alpha(a) independent from a (left). c must lie in the
// domain of alpha. Throws std::invalid_argument on bad input and
// std::runtime_error when `budget` candidates fail.
MoveWitness move_maximally_witness(Approximation& appr, PartialAutomorphism& alpha,
                                   const std::vector<int>& c,
                                   const std::vector<int>& p, MoveSide side,
                                   const Relation& rel, int budget = 8);

}  // namespace treeforge
