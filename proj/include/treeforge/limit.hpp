// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "treeforge/core.hpp"
#include "treeforge/structure.hpp"

namespace treeforge {

enum class ExtensionKind { kFresh, kBelow, kGap, kChild };
std::string_view extension_kind_name(ExtensionKind k);

// Position of one new point relative to a closed base X.
//   kFresh  X is empty
//   kBelow  below min X (upper = min X)
//   kGap    strictly between lower and upper, consecutive in X
//   kChild  in a new cone above lower
// A kChild with depends_on set hangs off the new gap point of descriptor
// `depends_on` (two-point positions); `edge_to_dependency` is then its edge
// to that point.
struct PointExtension {
  ExtensionKind kind = ExtensionKind::kFresh;
  int lower = kNone;
  int upper = kNone;
  bool on_branch = false;
  NodeSet neighbors;
  int depends_on = kNone;
  bool edge_to_dependency = false;

  auto operator<=>(const PointExtension&) const = default;
  bool operator==(const PointExtension&) const = default;
  std::string to_string() const;
};

// All one-point extension types over a closed base. With `neighbors` only
// that edge pattern is listed (relational structures). Throws
// std::invalid_argument when the base is not closed.
std::vector<PointExtension> enumerate_point_extensions(
    const MixedStructure& s, const NodeSet& base,
    const std::optional<NodeSet>& neighbors = std::nullopt);

// Descriptor realized by y over the closed base, or nullopt when y is in the
// base or <base y> adds more than y.
std::optional<PointExtension> describe_point(const MixedStructure& s,
                                             const NodeSet& base, int y);

// Smallest id realizing `ext` over `base` outside `exclude`, or kNone.
int find_realization(const MixedStructure& s, const NodeSet& base,
                     const PointExtension& ext, int exclude = kNone);

// Adds one point realizing a single-step `ext` over `base` (placement as in
// amalgamate_mixed with the base as common substructure) plus `extra_edges`
// to nodes outside the base. Returns the new id.
int grow_point(MixedStructure& s, const NodeSet& base, const PointExtension& ext,
               const NodeSet& extra_edges = {});

struct ExtensionRequest {
  NodeSet base;
  PointExtension ext;
  auto operator<=>(const ExtensionRequest&) const = default;
};

struct GrowthRecord {
  int stage = 0;  // number of growths before this one
  NodeSet base;
  PointExtension ext;
  int node = kNone;
  NodeSet edges;  // every neighbor of the new node at creation
};

struct BuildOptions {
  Flavor flavor = Flavor::kPlain;
  bool relational = true;
  int steps = 0;
  std::uint64_t seed = 1;
  int exhaustive_base = 3;   // bases up to this size are enqueued in full
  int sampled_base = 4;      // larger bases up to this size are sampled
  int samples_per_node = 8;
  double edge_density = 0.5;  // random edges from a fresh point to non-base nodes
};

// Growing chain of finite structures standing in for the countable limit.
// Node ids are stable; stage i consists of the ids below stage_size(i).
class Approximation {
 public:
  explicit Approximation(const BuildOptions& options);
  // Starts from a given structure instead of the one-point seed.
  Approximation(const BuildOptions& options, MixedStructure start);

  const MixedStructure& current() const { return current_; }
  MixedStructure& mutable_current() { return current_; }
  const BuildOptions& options() const { return options_; }
  const std::vector<GrowthRecord>& log() const { return log_; }
  std::mt19937_64& rng() { return rng_; }

  int growths() const { return static_cast<int>(log_.size()); }
  int stage_size(int stage) const;
  // Largest node id whose requests have all been processed (kNone if none).
  int frontier() const { return frontier_; }
  size_t pending() const { return queue_.size(); }
  std::uint64_t realized_existing() const { return realized_existing_; }

  // Runs the fair scheduler until `steps` more growths have happened.
  void run(int steps);

  // Existing realization (smallest id) or a fresh point; logged when fresh.
  // With `free_edges` the fresh point gets no edges outside its type.
  int realize(const ExtensionRequest& req, bool free_edges = false,
              int exclude = kNone);
  int grow(const NodeSet& base, const PointExtension& ext, bool free_edges);

  // Closed bases of the given size range whose largest id is x and whose
  // members are all <= x; deterministic order.
  std::vector<NodeSet> closed_bases_with_max(int x, int max_size) const;

  // Requests over ids <= max_id with bases up to max_size that are not
  // realized in the current structure.
  std::vector<ExtensionRequest> unrealized_over(int max_id, int max_size) const;

 private:
  void activate(int x);

  BuildOptions options_;
  MixedStructure current_;
  std::vector<GrowthRecord> log_;
  std::deque<ExtensionRequest> queue_;
  std::mt19937_64 rng_;
  int start_size_ = 1;
  int next_activation_ = 0;
  int frontier_ = kNone;
  std::uint64_t realized_existing_ = 0;
};

// Seeded build: one-point seed (the point for Pointed, the tip for
// Semibranched with the tip standing in for a branch) and `steps` growths.
Approximation build_approximation(const BuildOptions& options);

// Re-applies a growth log to the seed of `options`.
MixedStructure replay_growths(const BuildOptions& options,
                              const std::vector<GrowthRecord>& log);

using PartialIso = std::map<int, int>;

// True when p maps a closed set onto a closed set preserving the qf type.
bool is_partial_iso(const MixedStructure& s, const PartialIso& p);

// Extends p so that every node of `want` lies in its domain and its image,
// growing the approximation when needed. With `avoid_fix_outside` set, a new
// pair x -> x is only allowed for x inside that set. Throws
// std::invalid_argument when p is not a partial isomorphism.
PartialIso extend_partial_iso(Approximation& appr, const PartialIso& p,
                              const std::vector<int>& want,
                              const std::optional<NodeSet>& avoid_fix_outside =
                                  std::nullopt);

struct MixReport {
  int samples = 0;
  int realized = 0;
  int missing = 0;
  // Each missing sample: tree-side tuple and graph-side tuple.
  std::vector<std::pair<std::vector<int>, std::vector<int>>> missing_examples;
};

// Samples pairs (a1, a2): a1 enumerates a closed tree-side substructure,
// a2 an equally long tuple with the same constant pattern, and searches a
// tuple with a1's tree type and a2's edge type. a1 is generated by one or two
// random nodes and resampled until it has at most `max_size` elements.
MixReport check_generic_mix(const Approximation& appr, int budget,
                            std::uint64_t seed, int max_size = 3);

}  // namespace treeforge
