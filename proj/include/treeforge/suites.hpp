// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "treeforge/io.hpp"

namespace treeforge {

struct SuiteInfo {
  std::string id;
  std::string anchor;        // the statement the suite checks, in short
  std::string mode;          // "exhaustive", "randomized" or both
  int default_max_size = 0;
  int default_trials = 0;
};

// Fixed table, same order on every call.
const std::vector<SuiteInfo>& list_suites();

class UnknownSuite : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Throws UnknownSuite.
const SuiteInfo& suite_info(std::string_view id);

struct Counterexample {
  Json structure;  // structure_to_json of the host structure
  Json data;       // "check" names the replayable check, the rest is its input
  std::string message;
};

struct SuiteReport {
  std::string suite_id;
  std::uint64_t instances_checked = 0;
  std::optional<Counterexample> counterexample;
  double elapsed_seconds = 0;
  int max_size = 0;
  int trials = 0;
  std::uint64_t seed = 0;

  bool passed() const { return !counterexample.has_value(); }
};

// Exhaustive part over every structure of size <= max_size, randomized part
// with `trials` samples drawn from approximations seeded by `seed`. Stops at
// the first counterexample. Deterministic in (id, max_size, trials, seed)
// apart from elapsed_seconds. Throws UnknownSuite, BudgetExceeded when an
// enumeration is refused, std::invalid_argument on a negative size or trial
// count.
SuiteReport run_suite(std::string_view id, int max_size, int trials,
                      std::uint64_t seed);

// Re-runs the single failing check recorded in cx against its structure.
// True when the violation reproduces with the same message.
bool replay_counterexample(const Counterexample& cx);

// elapsed_seconds only with `timing`, so that reports of identical runs are
// byte-identical without it.
Json report_to_json(const SuiteReport& r, bool timing = false);
Json counterexample_to_json(const Counterexample& cx);
Counterexample counterexample_from_json(const Json& j);

}  // namespace treeforge
