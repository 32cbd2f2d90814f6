// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

namespace treeforge {

// Deliberate defects used to check that the verification suites have teeth.
// Production code consults active_mutant() at the few places a mutant lives.
enum class Mutant {
  kNone,
  kBrokenLca,           // meet of incomparable nodes returns one level too low
  kConeClauseI,         // cone_indep skips its betweenness clause
  kConeClauseII,        // cone_indep skips its separation clause
  kAmalgamInterleave,   // right-side gap chain is attached in reverse order
};

Mutant active_mutant();
void set_active_mutant(Mutant m);
std::string_view mutant_name(Mutant m);
Mutant parse_mutant(std::string_view name);

class ScopedMutant {
 public:
  explicit ScopedMutant(Mutant m) : prev_(active_mutant()) {
    set_active_mutant(m);
  }
  ~ScopedMutant() { set_active_mutant(prev_); }
  ScopedMutant(const ScopedMutant&) = delete;
  ScopedMutant& operator=(const ScopedMutant&) = delete;

 private:
  Mutant prev_;
};

}  // namespace treeforge
