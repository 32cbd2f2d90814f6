// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "json.hpp"
#include "treeforge/core.hpp"
#include "treeforge/structure.hpp"

namespace treeforge {

using Json = nlohmann::json;

// {"flavor", "n", "parent", "edges", "point", "semibranch_tip",
//  "treat_tip_as_branch", "relational"}; "relational" is optional on input
// and defaults to true exactly when edges are present.
Json structure_to_json(const MixedStructure& s);
MixedStructure structure_from_json(const Json& j);

Json qf_type_to_json(const QfTypeCode& code);

MixedStructure read_structure_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Tree edges solid, relational edges dashed, point double-circled, semibranch
// nodes shaded.
std::string to_dot(const MixedStructure& s);

// Parses "1,2,5" into a node set; empty string gives the empty set.
NodeSet parse_id_list(const std::string& text);

}  // namespace treeforge
