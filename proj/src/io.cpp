// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "treeforge/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace treeforge {

Json structure_to_json(const MixedStructure& s) {
  Json parent = Json::array();
  for (int p : s.parents()) {
    parent.push_back(p == kNone ? Json(nullptr) : Json(p));
  }
  Json edges = Json::array();
  for (auto [a, b] : s.edges()) edges.push_back({a, b});
  Json j;
  j["flavor"] = std::string(flavor_name(s.flavor()));
  j["n"] = s.size();
  j["parent"] = parent;
  j["edges"] = edges;
  j["point"] = s.point() == kNone ? Json(nullptr) : Json(s.point());
  j["semibranch_tip"] = s.tip() == kNone ? Json(nullptr) : Json(s.tip());
  j["treat_tip_as_branch"] = s.treat_tip_as_branch();
  j["relational"] = s.relational();
  return j;
}

MixedStructure structure_from_json(const Json& j) {
  Flavor flavor = parse_flavor(j.at("flavor").get<std::string>());
  std::vector<int> parent;
  for (const auto& p : j.at("parent")) {
    parent.push_back(p.is_null() ? kNone : p.get<int>());
  }
  if (j.contains("n") && j.at("n").get<int>() != static_cast<int>(parent.size())) {
    throw std::invalid_argument("\"n\" disagrees with the parent array");
  }
  std::vector<Edge> edges;
  if (j.contains("edges")) {
    for (const auto& e : j.at("edges")) {
      edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    }
  }
  auto opt_int = [&](const char* key) {
    return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<int>()
                                                   : kNone;
  };
  bool relational = j.value("relational", !edges.empty());
  return MixedStructure(flavor, std::move(parent), std::move(edges),
                        opt_int("point"), opt_int("semibranch_tip"), relational,
                        j.value("treat_tip_as_branch", false));
}

Json qf_type_to_json(const QfTypeCode& code) {
  Json j;
  j["flavor"] = std::string(flavor_name(code.flavor));
  j["arity"] = code.arity;
  j["augmented"] = code.augmented;
  j["meet_rel"] = code.meet_rel;
  j["edge_rel"] = code.edge_rel;
  j["eq_rel"] = code.eq_rel;
  return j;
}

MixedStructure read_structure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return structure_from_json(Json::parse(in));
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string to_dot(const MixedStructure& s) {
  std::ostringstream os;
  os << "graph treeforge {\n  node [shape=circle];\n";
  for (int v = 0; v < s.size(); ++v) {
    os << "  n" << v << " [label=\"" << v << "\"";
    if (s.flavor() == Flavor::kPointed && v == s.point()) {
      os << ", shape=doublecircle";
    }
    if (s.flavor() == Flavor::kSemibranched && s.well_formed() &&
        s.in_branch(v)) {
      os << ", style=filled, fillcolor=gray80";
    }
    os << "];\n";
  }
  for (int v = 0; v < s.size(); ++v) {
    if (s.parents()[v] != kNone) {
      os << "  n" << s.parents()[v] << " -- n" << v << ";\n";
    }
  }
  for (auto [a, b] : s.edges()) {
    os << "  n" << a << " -- n" << b << " [style=dashed, constraint=false];\n";
  }
  os << "}\n";
  return os.str();
}

NodeSet parse_id_list(const std::string& text) {
  std::vector<int> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    size_t used = 0;
    int v = std::stoi(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad id: " + item);
    ids.push_back(v);
  }
  return make_set(std::move(ids));
}

}  // namespace treeforge
