// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "treeforge/suites.hpp"

#include <gtest/gtest.h>

#include <set>

#include "treeforge/enumerate.hpp"
#include "treeforge/mutation.hpp"

namespace treeforge {
namespace {

TEST(Suites, TableListsEveryId) {
  const auto& all = list_suites();
  EXPECT_GE(all.size(), 22u);
  std::set<std::string> ids;
  for (const auto& s : all) {
    EXPECT_FALSE(s.anchor.empty()) << s.id;
    EXPECT_TRUE(ids.insert(s.id).second) << "duplicate " << s.id;
    EXPECT_EQ(&suite_info(s.id), &s);
  }
  EXPECT_EQ(&list_suites(), &all);
}

TEST(Suites, UnknownIdAndBadArguments) {
  EXPECT_THROW(suite_info("no-such-suite"), UnknownSuite);
  EXPECT_THROW(run_suite("no-such-suite", 1, 0, 1), UnknownSuite);
  EXPECT_THROW(run_suite("three-points", -1, 0, 1), std::invalid_argument);
  EXPECT_THROW(run_suite("generic-mix", 1, -5, 1), std::invalid_argument);
}

TEST(Suites, ThreePointsSingleNode) {
  SuiteReport r = run_suite("three-points", 1, 0, 1);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.instances_checked, 1u);
}

// n^3 ordered triples per unlabeled tree.
TEST(Suites, ThreePointsInstanceCount) {
  std::uint64_t want = 0;
  for (int n = 1; n <= 5; ++n) want += rooted_trees(n).size() * n * n * n;
  SuiteReport r = run_suite("three-points", 5, 0, 1);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.instances_checked, want);
}

TEST(Suites, ClosureBoundInstanceCount) {
  std::uint64_t want = 0;
  for (Flavor f : {Flavor::kPlain, Flavor::kSemibranched}) {
    for (const auto& s : enumerate_structures_upto(f, 5, false)) {
      want += (1u << s.size()) - 1;
    }
  }
  SuiteReport r = run_suite("closure-bound", 5, 0, 1);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.instances_checked, want);
}

TEST(Suites, EverySuitePassesSmall) {
  for (const auto& info : list_suites()) {
    SuiteReport r = run_suite(info.id, std::min(info.default_max_size, 3),
                              std::min(info.default_trials, 40), 7);
    EXPECT_TRUE(r.passed()) << info.id << ": "
                            << (r.counterexample ? r.counterexample->message : "");
    EXPECT_GT(r.instances_checked, 0u) << info.id;
  }
}

TEST(Suites, ZeroSizeChecksNothingExhaustive) {
  EXPECT_EQ(run_suite("four-points", 0, 0, 1).instances_checked, 0u);
  EXPECT_EQ(run_suite("unary-check", 3, 0, 1).instances_checked, 0u);
}

TEST(Suites, ReportsAreDeterministic) {
  for (const char* id : {"left-to-right-ext", "generic-mix", "unary-check", "swir-semibranch"}) {
    const int size = std::string(id) == "swir-semibranch" ? 3 : 2;
    const auto a = report_to_json(run_suite(id, size, 60, 11)).dump();
    const auto b = report_to_json(run_suite(id, size, 60, 11)).dump();
    EXPECT_EQ(a, b) << id;
  }
}

TEST(Suites, TimingOnlyOnRequest) {
  SuiteReport r = run_suite("three-points", 2, 0, 1);
  EXPECT_FALSE(report_to_json(r).contains("elapsed_seconds"));
  EXPECT_TRUE(report_to_json(r, true).contains("elapsed_seconds"));
  EXPECT_TRUE(report_to_json(r).at("counterexample").is_null());
}

struct MutantCase {
  Mutant mutant;
  const char* suite;
  int size;
};

class MutantCaught : public ::testing::TestWithParam<MutantCase> {};

TEST_P(MutantCaught, CounterexampleReplays) {
  const MutantCase& c = GetParam();
  Counterexample cx;
  {
    ScopedMutant guard(c.mutant);
    SuiteReport r = run_suite(c.suite, c.size, 0, 1);
    ASSERT_FALSE(r.passed());
    cx = counterexample_from_json(
        Json::parse(counterexample_to_json(*r.counterexample).dump()));
    EXPECT_TRUE(replay_counterexample(cx));
  }
  // Without the defect the same check is satisfied.
  EXPECT_FALSE(replay_counterexample(cx));
}

INSTANTIATE_TEST_SUITE_P(
    Mutants, MutantCaught,
    ::testing::Values(MutantCase{Mutant::kBrokenLca, "three-points", 5},
                      MutantCase{Mutant::kBrokenLca, "dichotomy", 5},
                      MutantCase{Mutant::kConeClauseI, "semibranch-cone-equiv", 5},
                      MutantCase{Mutant::kConeClauseII, "cone-lemma", 5},
                      MutantCase{Mutant::kConeClauseII, "indep-generation", 5},
                      MutantCase{Mutant::kAmalgamInterleave, "amalgam-strong", 3}));

TEST(Suites, ConeClauseIMutantCaughtByAxioms) {
  ScopedMutant guard(Mutant::kConeClauseI);
  SuiteReport r = run_suite("swir-cone", 5, 0, 1);
  ASSERT_FALSE(r.passed());
  EXPECT_TRUE(replay_counterexample(*r.counterexample));
}

TEST(Suites, TamperedCounterexampleDoesNotReplay) {
  ScopedMutant guard(Mutant::kBrokenLca);
  SuiteReport r = run_suite("three-points", 4, 0, 1);
  ASSERT_FALSE(r.passed());
  Counterexample cx = *r.counterexample;
  cx.message += " (edited)";
  EXPECT_FALSE(replay_counterexample(cx));
  Counterexample bad = *r.counterexample;
  bad.data["check"] = "no-such-check";
  EXPECT_THROW(replay_counterexample(bad), std::invalid_argument);
}

}  // namespace
}  // namespace treeforge
