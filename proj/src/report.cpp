// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "treeforge/report.hpp"

#include <stdexcept>
#include <string>

namespace treeforge {
namespace {

ExtensionKind parse_extension_kind(const std::string& name) {
  for (ExtensionKind k : {ExtensionKind::kFresh, ExtensionKind::kBelow,
                          ExtensionKind::kGap, ExtensionKind::kChild}) {
    if (extension_kind_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown extension kind: " + name);
}

Json node_or_null(int v) { return v == kNone ? Json(nullptr) : Json(v); }
int node_from(const Json& j) { return j.is_null() ? kNone : j.get<int>(); }

Json term_to_json(const Term& t) { return {{"node", t.node}, {"word", t.word}}; }

}  // namespace

Json point_extension_to_json(const PointExtension& e) {
  Json j{{"kind", std::string(extension_kind_name(e.kind))},
         {"lower", node_or_null(e.lower)},
         {"upper", node_or_null(e.upper)},
         {"on_branch", e.on_branch},
         {"neighbors", e.neighbors}};
  if (e.depends_on != kNone) {
    j["depends_on"] = e.depends_on;
    j["edge_to_dependency"] = e.edge_to_dependency;
  }
  return j;
}

PointExtension point_extension_from_json(const Json& j) {
  PointExtension e;
  e.kind = parse_extension_kind(j.at("kind").get<std::string>());
  e.lower = node_from(j.at("lower"));
  e.upper = node_from(j.at("upper"));
  e.on_branch = j.at("on_branch").get<bool>();
  e.neighbors = make_set(j.at("neighbors").get<std::vector<int>>());
  e.depends_on = j.contains("depends_on") ? j["depends_on"].get<int>() : kNone;
  e.edge_to_dependency = j.value("edge_to_dependency", false);
  return e;
}

Json growth_log_to_json(const std::vector<GrowthRecord>& log) {
  Json out = Json::array();
  for (const auto& r : log) {
    out.push_back({{"stage", r.stage},
                   {"base", r.base},
                   {"ext", point_extension_to_json(r.ext)},
                   {"node", r.node},
                   {"edges", r.edges}});
  }
  return out;
}

std::vector<GrowthRecord> growth_log_from_json(const Json& j) {
  std::vector<GrowthRecord> out;
  for (const auto& r : j) {
    GrowthRecord g;
    g.stage = r.at("stage").get<int>();
    g.base = make_set(r.at("base").get<std::vector<int>>());
    g.ext = point_extension_from_json(r.at("ext"));
    g.node = r.at("node").get<int>();
    g.edges = make_set(r.at("edges").get<std::vector<int>>());
    out.push_back(std::move(g));
  }
  return out;
}

Json build_options_to_json(const BuildOptions& o) {
  return {{"flavor", std::string(flavor_name(o.flavor))},
          {"relational", o.relational},
          {"steps", o.steps},
          {"seed", o.seed},
          {"exhaustive_base", o.exhaustive_base},
          {"sampled_base", o.sampled_base},
          {"samples_per_node", o.samples_per_node},
          {"edge_density", o.edge_density}};
}

BuildOptions build_options_from_json(const Json& j) {
  BuildOptions o;
  o.flavor = parse_flavor(j.at("flavor").get<std::string>());
  o.relational = j.value("relational", o.relational);
  o.steps = j.value("steps", o.steps);
  o.seed = j.value("seed", o.seed);
  o.exhaustive_base = j.value("exhaustive_base", o.exhaustive_base);
  o.sampled_base = j.value("sampled_base", o.sampled_base);
  o.samples_per_node = j.value("samples_per_node", o.samples_per_node);
  o.edge_density = j.value("edge_density", o.edge_density);
  return o;
}

Json approximation_to_json(const Approximation& appr) {
  return {{"options", build_options_to_json(appr.options())},
          {"structure", structure_to_json(appr.current())},
          {"log", growth_log_to_json(appr.log())}};
}

Json partial_iso_to_json(const PartialIso& p) {
  Json out = Json::array();
  for (auto [x, y] : p) out.push_back({x, y});
  return out;
}

PartialIso partial_iso_from_json(const Json& j) {
  PartialIso p;
  for (const auto& pair : j) {
    const int x = pair.at(0).get<int>();
    if (!p.emplace(x, pair.at(1).get<int>()).second) {
      throw std::invalid_argument("map lists " + std::to_string(x) + " twice");
    }
  }
  return p;
}

Json verdict_to_json(const IndepVerdict& v) {
  return {{"independent", v.independent},
          {"clause", std::string(clause_name(v.clause))},
          {"side", std::string(side_name(v.side))},
          {"witness", v.witness}};
}

Json certificate_to_json(const AmalgamCertificate& c) {
  return {{"valid", c.valid},     {"left_ok", c.left_ok}, {"right_ok", c.right_ok},
          {"commutes", c.commutes}, {"strong", c.strong}, {"ok", c.ok()}};
}

Json amalgam_to_json(const AmalgamResult& r) {
  return {{"amalgam", structure_to_json(r.amalgam)},
          {"left", r.left},
          {"right", r.right},
          {"base", r.base},
          {"certificate", certificate_to_json(r.certificate)}};
}

Json dichotomy_to_json(const DichotomyResult& r) {
  Json meets = Json::array();
  for (const auto& m : r.meets) meets.push_back({m[0], m[1], m[2]});
  return {{"kind", std::string(dichotomy_name(r.kind))},
          {"chain", r.chain},
          {"apex", node_or_null(r.apex)},
          {"meets", meets}};
}

Json fan_report_to_json(const FanReport& r) {
  return {{"order", r.order}, {"vacuous", r.vacuous}, {"fan", r.fan}};
}

Json cone_permutation_to_json(const ConePermutationResult& r) {
  Json stages = Json::array();
  for (const auto& c : r.stages) stages.push_back(stage_certificate_to_json(c));
  return {{"g", r.g},
          {"map", partial_iso_to_json(r.map)},
          {"cone_reps", r.cone_reps},
          {"sigma", r.sigma},
          {"declared_fixed", r.declared_fixed},
          {"stages", stages}};
}

Json stage_certificate_to_json(const StageCertificate& c) {
  Json checks = Json::array();
  for (const auto& t : c.checks) {
    checks.push_back({{"lhs", term_to_json(t.lhs)},
                      {"op", std::string(1, t.op)},
                      {"rhs", term_to_json(t.rhs)}});
  }
  return {{"stage", c.stage},   {"invariant", c.invariant}, {"ok", c.ok},
          {"detail", c.detail}, {"domain", c.domain},       {"image", c.image},
          {"required", c.required}, {"checks", checks}};
}

Json motion_rule_to_json(const MotionRule& r) {
  return {{"upper", node_or_null(r.upper)},
          {"upper_dir", r.upper_dir},
          {"lower", node_or_null(r.lower)},
          {"lower_dir", r.lower_dir}};
}

MotionRule motion_rule_from_json(const Json& j) {
  MotionRule r;
  r.upper = node_from(j.value("upper", Json(nullptr)));
  r.upper_dir = j.value("upper_dir", 0);
  r.lower = node_from(j.value("lower", Json(nullptr)));
  r.lower_dir = j.value("lower_dir", 0);
  return r;
}

Json build_result_to_json(const StagedBuildResult& r) {
  auto seq = [](const std::map<int, int>& m) {
    Json out = Json::object();
    for (auto [k, v] : m) out[std::to_string(k)] = v;
    return out;
  };
  Json values = Json::array();
  for (auto [x, y] : r.product_values) values.push_back({x, y});
  return {{"recipe", std::string(recipe_name(r.recipe))},
          {"branch", r.branch},
          {"stages", r.stages},
          {"alpha", partial_iso_to_json(r.alpha.map)},
          {"beta", partial_iso_to_json(r.beta)},
          {"a", seq(r.a)},
          {"a_prime", seq(r.a_prime)},
          {"c", seq(r.c)},
          {"c_prime", seq(r.c_prime)},
          {"w_order", r.w_order},
          {"v_order", r.v_order},
          {"product_values", values},
          {"product_increasing", r.product_increasing},
          {"window_uncovered", r.window_uncovered}};
}

Json alpha_order_to_json(const AlphaOrderResult& r) {
  Json cert = Json::array();
  for (const auto& c : r.certificate) {
    cert.push_back({{"condition", c.condition}, {"ok", c.ok}, {"witness", c.witness}});
  }
  return {{"tuple", r.tuple},
          {"first_above", r.first_above},
          {"inserted", r.inserted},
          {"certificate", cert}};
}

Json move_witness_to_json(const MoveWitness& w) {
  return {{"a", w.a},
          {"image", w.image},
          {"algebraic", w.algebraic},
          {"attempts", w.attempts},
          {"verdict", verdict_to_json(w.verdict)},
          {"type", qf_type_to_json(w.type)}};
}

}  // namespace treeforge
