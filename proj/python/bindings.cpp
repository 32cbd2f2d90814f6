// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

// Python entry points. Structures and results cross as JSON text; the
// package wrapper parses them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "treeforge/amalgam.hpp"
#include "treeforge/autolab.hpp"
#include "treeforge/indep.hpp"
#include "treeforge/io.hpp"
#include "treeforge/limit.hpp"
#include "treeforge/report.hpp"
#include "treeforge/suites.hpp"
#include "treeforge/version.hpp"

namespace py = pybind11;
namespace tf = treeforge;

namespace {

tf::MixedStructure parse(const std::string& text) {
  return tf::structure_from_json(tf::Json::parse(text));
}

std::string gen(const std::string& flavor, int steps, std::uint64_t seed, bool edges) {
  tf::BuildOptions o;
  o.flavor = flavor == "mixed" ? tf::Flavor::kPlain : tf::parse_flavor(flavor);
  o.relational = edges;
  o.steps = steps;
  o.seed = seed;
  py::gil_scoped_release release;
  tf::Json j = tf::approximation_to_json(tf::build_approximation(o));
  j["seed"] = seed;
  return j.dump();
}

std::string amalgamate(const std::string& left, const std::string& right,
                       const std::optional<std::string>& base,
                       const std::vector<int>& map_left, const std::vector<int>& map_right,
                       bool mixed) {
  const tf::MixedStructure l = parse(left), r = parse(right);
  mixed = mixed || l.relational() || r.relational();
  tf::AmalgamResult out;
  if (!base) {
    out = tf::joint_embed(l, r);
  } else {
    const tf::MixedStructure c = parse(*base);
    out = mixed ? tf::amalgamate_mixed(c, l, map_left, r, map_right)
                : tf::amalgamate_tree(c, l, map_left, r, map_right);
    out.certificate = tf::certify_amalgam(c, l, map_left, r, map_right, out);
  }
  tf::Json j = tf::amalgam_to_json(out);
  j["mixed"] = mixed;
  return j.dump();
}

std::string indep(const std::string& structure, const std::string& relation,
                  const std::vector<int>& a, const std::vector<int>& b,
                  const std::vector<int>& c, std::optional<int> gamma) {
  const tf::Relation rel{tf::parse_relation(relation), gamma.value_or(tf::kNone)};
  return tf::verdict_to_json(tf::independent(parse(structure), rel, tf::make_set(a),
                                             tf::make_set(b), tf::make_set(c)))
      .dump();
}

tf::FiniteAutomorphism automorphism(const std::string& structure,
                                    const std::vector<int>& perm) {
  tf::FiniteAutomorphism f{parse(structure), perm};
  const std::string err = tf::automorphism_error(f);
  if (!err.empty()) throw std::invalid_argument("not an automorphism: " + err);
  return f;
}

std::string dichotomy(const std::string& structure, const std::vector<int>& perm) {
  const auto f = automorphism(structure, perm);
  const auto r = tf::fixed_chain_dichotomy(f);
  tf::Json j = tf::dichotomy_to_json(r);
  j["replays"] = tf::replay_dichotomy(f, r);
  return j.dump();
}

std::string fan(const std::string& structure, const std::vector<int>& perm, int g,
                int max_power) {
  const auto f = automorphism(structure, perm);
  const int k = max_power > 0 ? max_power : static_cast<int>(tf::automorphism_order(f));
  tf::Json j = tf::fan_report_to_json(tf::is_fan_above(f, g, k));
  j["g"] = g;
  return j.dump();
}

std::string run_suite(const std::string& id, int max_size, int trials, std::uint64_t seed) {
  tf::SuiteReport r;
  {
    py::gil_scoped_release release;
    r = tf::run_suite(id, max_size, trials, seed);
  }
  return tf::report_to_json(r, true).dump();
}

std::string list_suites() {
  tf::Json out = tf::Json::array();
  for (const auto& s : tf::list_suites()) {
    out.push_back({{"id", s.id},
                   {"anchor", s.anchor},
                   {"mode", s.mode},
                   {"default_max_size", s.default_max_size},
                   {"default_trials", s.default_trials}});
  }
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_treeforge, m) {
  m.doc() = "treeforge native core";
  m.attr("__version__") = std::string(tf::kVersion);

  py::register_exception<tf::UnknownSuite>(m, "UnknownSuite", PyExc_KeyError);

  m.def("gen", &gen, py::arg("flavor") = "mixed", py::arg("steps") = 100,
        py::arg("seed") = 1, py::arg("edges") = true);
  m.def("amalgamate", &amalgamate, py::arg("left"), py::arg("right"),
        py::arg("base") = std::nullopt, py::arg("map_left") = std::vector<int>{},
        py::arg("map_right") = std::vector<int>{}, py::arg("mixed") = false);
  m.def("indep", &indep, py::arg("structure"), py::arg("relation"), py::arg("a"),
        py::arg("b"), py::arg("c") = std::vector<int>{}, py::arg("gamma") = std::nullopt);
  m.def("dichotomy", &dichotomy, py::arg("structure"), py::arg("perm"));
  m.def("fan", &fan, py::arg("structure"), py::arg("perm"), py::arg("g"),
        py::arg("max_power") = 0);
  m.def("run_suite", &run_suite, py::arg("id"), py::arg("max_size"), py::arg("trials") = 0,
        py::arg("seed") = 1);
  m.def("list_suites", &list_suites);
  m.def("to_dot", [](const std::string& s) { return tf::to_dot(parse(s)); },
        py::arg("structure"));
  m.def("normalize", [](const std::string& s) {
    return tf::structure_to_json(parse(s)).dump();
  }, py::arg("structure"));
}
