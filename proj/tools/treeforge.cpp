// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

// treeforge: command line front end. Exit codes: 0 ok, 1 operation failed,
// 2 bad invocation, 3 verify found a counterexample.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "treeforge/amalgam.hpp"
#include "treeforge/autolab.hpp"
#include "treeforge/enumerate.hpp"
#include "treeforge/indep.hpp"
#include "treeforge/io.hpp"
#include "treeforge/limit.hpp"
#include "treeforge/mutation.hpp"
#include "treeforge/report.hpp"
#include "treeforge/suites.hpp"
#include "treeforge/version.hpp"

namespace tf = treeforge;
using tf::Json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCounterexample = 3;

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return Json::parse(in);
}

// A bare structure, or any document carrying one under "structure".
tf::MixedStructure load_structure(const std::string& path) {
  Json j = read_json(path);
  if (j.is_object() && j.contains("structure")) return tf::structure_from_json(j["structure"]);
  return tf::structure_from_json(j);
}

// Ordered, repetitions kept: "2,0,1".
std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad id: " + item);
    out.push_back(v);
  }
  return out;
}

void emit(const Json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    tf::write_text_file(out, text);
  }
}

Json stamp(Json j) {
  j["version"] = std::string(tf::kVersion);
  return j;
}

// gen

struct GenArgs {
  std::string flavor = "mixed";
  bool no_edges = false;
  int steps = 0;
  std::uint64_t seed = 1;
  std::string out;
  std::string dot;
  std::string replay;
};

int run_gen(const GenArgs& a) {
  tf::BuildOptions o;
  if (!a.replay.empty()) {
    Json doc = read_json(a.replay);
    o = tf::build_options_from_json(doc.at("options"));
    tf::MixedStructure s = tf::replay_growths(o, tf::growth_log_from_json(doc.at("log")));
    Json j{{"options", tf::build_options_to_json(o)},
           {"structure", tf::structure_to_json(s)},
           {"log", doc.at("log")},
           {"seed", o.seed}};
    emit(stamp(j), a.out);
    if (!a.dot.empty()) tf::write_text_file(a.dot, tf::to_dot(s));
    return 0;
  }
  // "mixed" is the plain tree with the graph layer.
  o.flavor = a.flavor == "mixed" ? tf::Flavor::kPlain : tf::parse_flavor(a.flavor);
  o.relational = !a.no_edges;
  o.steps = a.steps;
  o.seed = a.seed;
  tf::Approximation appr = tf::build_approximation(o);
  Json j = tf::approximation_to_json(appr);
  j["seed"] = a.seed;
  emit(stamp(j), a.out);
  if (!a.dot.empty()) tf::write_text_file(a.dot, tf::to_dot(appr.current()));
  return 0;
}

// amalgamate

struct AmalgamArgs {
  std::string left, right, base, map_left, map_right, out;
  bool mixed = false;
};

int run_amalgamate(const AmalgamArgs& a) {
  const tf::MixedStructure left = load_structure(a.left);
  const tf::MixedStructure right = load_structure(a.right);
  const bool mixed = a.mixed || left.relational() || right.relational();
  tf::AmalgamResult r;
  if (a.base.empty()) {
    r = tf::joint_embed(left, right);
  } else {
    const tf::MixedStructure base = load_structure(a.base);
    const auto f = parse_ints(a.map_left);
    const auto g = parse_ints(a.map_right);
    r = mixed ? tf::amalgamate_mixed(base, left, f, right, g)
              : tf::amalgamate_tree(base, left, f, right, g);
    r.certificate = tf::certify_amalgam(base, left, f, right, g, r);
  }
  Json j = tf::amalgam_to_json(r);
  j["mixed"] = mixed;
  emit(stamp(j), a.out);
  return r.certificate.ok() || a.base.empty() ? 0 : kExitFailure;
}

// indep

struct IndepArgs {
  std::string structure, relation = "cone", A, B, C, out;
  int gamma = tf::kNone;
};

int run_indep(const IndepArgs& a) {
  const tf::MixedStructure s = load_structure(a.structure);
  const tf::Relation rel{tf::parse_relation(a.relation), a.gamma};
  const tf::NodeSet A = tf::parse_id_list(a.A), B = tf::parse_id_list(a.B),
                    C = tf::parse_id_list(a.C);
  const tf::IndepVerdict v = tf::independent(s, rel, A, B, C);
  Json j{{"relation", a.relation},
         {"gamma", a.gamma == tf::kNone ? Json(nullptr) : Json(a.gamma)},
         {"A", A},
         {"B", B},
         {"C", C},
         {"verdict", tf::verdict_to_json(v)}};
  emit(stamp(j), a.out);
  return 0;
}

// auto

struct AutoArgs {
  std::string structure, perm, tuple, sigma, setup, recipe = "c1", side = "right",
      relation = "semibranch", c, p, out;
  int g = tf::kNone;
  int max_power = 0;
  int steps = 4;
  int stages = 5;
};

tf::FiniteAutomorphism load_automorphism(const AutoArgs& a) {
  tf::FiniteAutomorphism f{load_structure(a.structure), parse_ints(a.perm)};
  const std::string err = tf::automorphism_error(f);
  if (!err.empty()) throw std::invalid_argument("not an automorphism: " + err);
  return f;
}

int need_g(const AutoArgs& a) {
  if (a.g == tf::kNone) throw std::invalid_argument("--g is required");
  return a.g;
}

// Setup document: {"structure", "alpha": [[x, y], ...], "rule": {...},
// "window", "orbit_up", "orbit_down"}; the approximation starts from the
// structure.
struct Setup {
  tf::Approximation appr;
  tf::PartialAutomorphism alpha;
  Json doc;
};

Setup load_setup(const std::string& path) {
  Json doc = read_json(path);
  tf::MixedStructure s = tf::structure_from_json(doc.at("structure"));
  tf::BuildOptions o;
  o.flavor = s.flavor();
  o.relational = s.relational();
  o.seed = doc.value("seed", std::uint64_t{1});
  tf::Approximation appr(o, s);
  tf::PartialAutomorphism alpha = tf::make_partial_automorphism(
      appr.current(), tf::partial_iso_from_json(doc.at("alpha")),
      tf::motion_rule_from_json(doc.value("rule", Json::object())));
  return {std::move(appr), std::move(alpha), std::move(doc)};
}

int run_auto(const std::string& mode, const AutoArgs& a) {
  if (mode == "dichotomy") {
    const auto f = load_automorphism(a);
    const auto r = tf::fixed_chain_dichotomy(f);
    Json j = tf::dichotomy_to_json(r);
    j["replays"] = tf::replay_dichotomy(f, r);
    emit(stamp(j), a.out);
    return 0;
  }
  if (mode == "fan") {
    const auto f = load_automorphism(a);
    const int k = a.max_power > 0 ? a.max_power
                                   : static_cast<int>(tf::automorphism_order(f));
    Json j = tf::fan_report_to_json(tf::is_fan_above(f, need_g(a), k));
    j["g"] = a.g;
    emit(stamp(j), a.out);
    return 0;
  }
  if (mode == "order") {
    const auto f = load_automorphism(a);
    emit(stamp(tf::alpha_order_to_json(tf::alpha_order(f, parse_ints(a.tuple), need_g(a)))),
         a.out);
    return 0;
  }
  if (mode == "conepermute") {
    const tf::MixedStructure s = load_structure(a.structure);
    tf::BuildOptions o;
    o.flavor = s.flavor();
    o.relational = s.relational();
    tf::Approximation appr(o, s);
    const auto r = tf::realize_cone_permutation(appr, need_g(a), parse_ints(a.sigma), a.steps);
    Json j = tf::cone_permutation_to_json(r);
    j["structure"] = tf::structure_to_json(appr.current());
    emit(stamp(j), a.out);
    return 0;
  }
  if (mode == "build") {
    Setup st = load_setup(a.setup);
    const auto window = st.doc.value("window", std::vector<int>{});
    const int up = st.doc.value("orbit_up", tf::kNone);
    const int down = st.doc.value("orbit_down", tf::kNone);
    const auto r = tf::staged_commutator_builder(st.appr, tf::parse_recipe(a.recipe),
                                                 st.alpha, a.stages, window, up, down);
    // One certificate per line, then the summary line.
    std::ostringstream os;
    bool all_ok = true;
    for (const auto& c : r.certificates) {
      Json cj = tf::stage_certificate_to_json(c);
      cj["replays"] = tf::replay_certificate(st.appr.current(), r, c);
      all_ok = all_ok && c.ok && cj["replays"].get<bool>();
      os << cj.dump() << "\n";
    }
    Json summary = tf::build_result_to_json(r);
    summary["structure"] = tf::structure_to_json(st.appr.current());
    summary["certificates_ok"] = all_ok;
    os << stamp(summary).dump() << "\n";
    if (a.out.empty()) {
      std::cout << os.str();
    } else {
      tf::write_text_file(a.out, os.str());
    }
    return all_ok && r.product_increasing ? 0 : kExitFailure;
  }
  if (mode == "witness") {
    Setup st = load_setup(a.setup);
    const tf::MoveSide side = a.side == "left" ? tf::MoveSide::kLeft : tf::MoveSide::kRight;
    if (a.side != "left" && a.side != "right") {
      throw std::invalid_argument("--side is left or right");
    }
    const tf::Relation rel{tf::parse_relation(a.relation), a.g};
    const auto w = tf::move_maximally_witness(st.appr, st.alpha, parse_ints(a.c),
                                              parse_ints(a.p), side, rel);
    Json j = tf::move_witness_to_json(w);
    j["alpha"] = tf::partial_iso_to_json(st.alpha.map);
    j["structure"] = tf::structure_to_json(st.appr.current());
    emit(stamp(j), a.out);
    return 0;
  }
  throw std::invalid_argument("unknown auto mode: " + mode);
}

// verify

struct VerifyArgs {
  std::string suite = "all";
  int max_size = -1;
  int trials = -1;
  std::uint64_t seed = 1;
  std::string json;
  std::string mutant = "none";
  bool timing = false;
  bool list = false;
};

int run_verify(const VerifyArgs& a) {
  if (a.list) {
    for (const auto& s : tf::list_suites()) {
      std::cout << s.id << "\t" << s.mode << "\t" << s.anchor << "\n";
    }
    return 0;
  }
  tf::ScopedMutant guard(tf::parse_mutant(a.mutant));
  std::vector<tf::SuiteInfo> chosen;
  if (a.suite == "all") {
    chosen = tf::list_suites();
  } else {
    chosen.push_back(tf::suite_info(a.suite));
  }
  Json reports = Json::array();
  bool passed = true;
  for (const auto& info : chosen) {
    const int size = a.max_size >= 0 ? a.max_size : info.default_max_size;
    const int trials = a.trials >= 0 ? a.trials : info.default_trials;
    const tf::SuiteReport r = tf::run_suite(info.id, size, trials, a.seed);
    passed = passed && r.passed();
    std::cout << info.id << ": " << (r.passed() ? "PASS" : "FAIL") << " ("
              << r.instances_checked << " instances, max_size " << size << ")";
    if (a.timing) std::cout << " " << r.elapsed_seconds << "s";
    std::cout << "\n";
    if (r.counterexample) std::cout << "  counterexample: " << r.counterexample->message << "\n";
    reports.push_back(tf::report_to_json(r, a.timing));
  }
  if (!a.json.empty()) {
    Json j{{"seed", a.seed},
           {"mutant", a.mutant},
           {"passed", passed},
           {"suites", reports}};
    emit(stamp(j), a.json);
  }
  return passed ? 0 : kExitCounterexample;
}

// export

struct ExportArgs {
  std::string structure, dot, json;
};

int run_export(const ExportArgs& a) {
  const tf::MixedStructure s = load_structure(a.structure);
  if (a.dot.empty() && a.json.empty()) {
    std::cout << tf::structure_to_json(s).dump(2) << "\n";
    return 0;
  }
  if (!a.dot.empty()) tf::write_text_file(a.dot, tf::to_dot(s));
  if (!a.json.empty()) tf::write_text_file(a.json, tf::structure_to_json(s).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"treeforge: meet-trees, their generic mixes and independence relations"};
  app.set_version_flag("--version", std::string(tf::kVersion));
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "build a seeded finite approximation of the limit");
  g->add_option("--flavor", gen.flavor, "plain, pointed, semibranched or mixed (plain with edges)")
      ->check(CLI::IsMember({"plain", "pointed", "semibranched", "mixed"}));
  g->add_flag("--no-edges", gen.no_edges, "leave out the graph layer");
  g->add_option("--steps", gen.steps, "number of growth steps")->check(CLI::NonNegativeNumber);
  g->add_option("--seed", gen.seed, "random seed (default 1)");
  g->add_option("--out", gen.out, "output file (default stdout)");
  g->add_option("--dot", gen.dot, "also write a DOT rendering");
  g->add_option("--replay", gen.replay, "re-apply the growth log of an earlier gen output")
      ->check(CLI::ExistingFile);

  AmalgamArgs am;
  auto* a = app.add_subcommand("amalgamate", "strong amalgam of two structures over a base");
  a->add_option("--left", am.left, "structure A")->required()->check(CLI::ExistingFile);
  a->add_option("--right", am.right, "structure B")->required()->check(CLI::ExistingFile);
  a->add_option("--base", am.base, "base C; without it the joint embedding is built")
      ->check(CLI::ExistingFile);
  a->add_option("--map-left", am.map_left, "embedding C -> A as images of 0,1,...");
  a->add_option("--map-right", am.map_right, "embedding C -> B as images of 0,1,...");
  a->add_flag("--mixed", am.mixed, "use the mixed amalgam even for edge-free inputs");
  a->add_option("--out", am.out, "output file (default stdout)");

  IndepArgs ind;
  auto* i = app.add_subcommand("indep", "decide A independent from B over C");
  i->add_option("--structure", ind.structure, "structure file")->required()->check(CLI::ExistingFile);
  i->add_option("--relation", ind.relation, "cone, semibranch, graph, mixed-cone, mixed-semibranch")
      ->check(CLI::IsMember({"cone", "semibranch", "graph", "mixed-cone", "mixed-semibranch"}));
  i->add_option("--gamma", ind.gamma, "cone base point (default: the point)");
  i->add_option("--A", ind.A, "ids, comma separated");
  i->add_option("--B", ind.B, "ids, comma separated");
  i->add_option("--C", ind.C, "ids, comma separated");
  i->add_option("--out", ind.out, "output file (default stdout)");

  AutoArgs au;
  std::string mode;
  auto* u = app.add_subcommand("auto", "automorphism tools");
  u->add_option("mode", mode, "dichotomy, fan, conepermute, build, order or witness")
      ->required()
      ->check(CLI::IsMember({"dichotomy", "fan", "conepermute", "build", "order", "witness"}));
  u->add_option("--structure", au.structure, "structure file")->check(CLI::ExistingFile);
  u->add_option("--perm", au.perm, "automorphism as images of 0,1,...");
  u->add_option("--g", au.g, "base node");
  u->add_option("--max-power", au.max_power, "fan: powers to check (default: the order)");
  u->add_option("--tuple", au.tuple, "order: tuple to arrange");
  u->add_option("--sigma", au.sigma, "conepermute: permutation of the cones at g");
  u->add_option("--steps", au.steps, "conepermute: back-and-forth steps");
  u->add_option("--setup", au.setup, "build/witness: setup JSON")->check(CLI::ExistingFile);
  u->add_option("--recipe", au.recipe, "build: c1, c2 or c3")
      ->check(CLI::IsMember({"c1", "c2", "c3"}));
  u->add_option("--stages", au.stages, "build: number of stages")->check(CLI::NonNegativeNumber);
  u->add_option("--side", au.side, "witness: right or left")
      ->check(CLI::IsMember({"right", "left"}));
  u->add_option("--relation", au.relation, "witness: relation");
  u->add_option("--c", au.c, "witness: base tuple");
  u->add_option("--p", au.p, "witness: tuple whose type over c is realized");
  u->add_option("--out", au.out, "output file (default stdout)");

  VerifyArgs ve;
  auto* v = app.add_subcommand("verify", "run verification suites");
  v->add_option("--suite", ve.suite, "suite id or all");
  v->add_option("--max-size", ve.max_size, "structure size bound (default per suite)")
      ->check(CLI::NonNegativeNumber);
  v->add_option("--trials", ve.trials, "random trials (default per suite)")
      ->check(CLI::NonNegativeNumber);
  v->add_option("--seed", ve.seed, "random seed (default 1)");
  v->add_option("--json", ve.json, "write the JSON report here");
  v->add_option("--mutant", ve.mutant,
                "run with a defect: none, broken-lca, cone-clause-i, cone-clause-ii, "
                "amalgam-interleave")
      ->check(CLI::IsMember(
          {"none", "broken-lca", "cone-clause-i", "cone-clause-ii", "amalgam-interleave"}));
  v->add_flag("--timing", ve.timing, "report elapsed seconds");
  v->add_flag("--list", ve.list, "list the suites and exit");

  ExportArgs ex;
  auto* e = app.add_subcommand("export", "re-emit a structure as JSON or DOT");
  e->add_option("--structure", ex.structure, "structure file")->required()->check(CLI::ExistingFile);
  e->add_option("--dot", ex.dot, "DOT output file");
  e->add_option("--json", ex.json, "JSON output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    std::cerr << "error: " << err.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*g) return run_gen(gen);
    if (*a) return run_amalgamate(am);
    if (*i) return run_indep(ind);
    if (*u) return run_auto(mode, au);
    if (*v) return run_verify(ve);
    if (*e) return run_export(ex);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
