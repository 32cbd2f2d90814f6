// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "treeforge/mutation.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace treeforge {
namespace {
std::atomic<Mutant> g_mutant{Mutant::kNone};
}  // namespace

Mutant active_mutant() { return g_mutant.load(std::memory_order_relaxed); }

void set_active_mutant(Mutant m) {
  g_mutant.store(m, std::memory_order_relaxed);
}

std::string_view mutant_name(Mutant m) {
  switch (m) {
    case Mutant::kNone: return "none";
    case Mutant::kBrokenLca: return "broken-lca";
    case Mutant::kConeClauseI: return "cone-clause-i";
    case Mutant::kConeClauseII: return "cone-clause-ii";
    case Mutant::kAmalgamInterleave: return "amalgam-interleave";
  }
  return "none";
}

Mutant parse_mutant(std::string_view name) {
  for (Mutant m : {Mutant::kNone, Mutant::kBrokenLca, Mutant::kConeClauseI,
                   Mutant::kConeClauseII, Mutant::kAmalgamInterleave}) {
    if (mutant_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown mutant: " + std::string(name));
}

}  // namespace treeforge
