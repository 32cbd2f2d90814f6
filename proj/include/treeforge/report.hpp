// Copyright 2026 The treeforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// JSON views of the results of the library operations, shared by the CLI
// and the Python module.

#include <vector>

#include "treeforge/amalgam.hpp"
#include "treeforge/autolab.hpp"
#include "treeforge/indep.hpp"
#include "treeforge/io.hpp"
#include "treeforge/limit.hpp"

namespace treeforge {

Json point_extension_to_json(const PointExtension& e);
PointExtension point_extension_from_json(const Json& j);

Json growth_log_to_json(const std::vector<GrowthRecord>& log);
std::vector<GrowthRecord> growth_log_from_json(const Json& j);

Json build_options_to_json(const BuildOptions& o);
BuildOptions build_options_from_json(const Json& j);

// {"options", "structure", "log", "stage_sizes"}
Json approximation_to_json(const Approximation& appr);

// [[x, y], ...] in key order.
Json partial_iso_to_json(const PartialIso& p);
PartialIso partial_iso_from_json(const Json& j);

Json verdict_to_json(const IndepVerdict& v);
Json certificate_to_json(const AmalgamCertificate& c);
Json amalgam_to_json(const AmalgamResult& r);
Json dichotomy_to_json(const DichotomyResult& r);
Json fan_report_to_json(const FanReport& r);
Json cone_permutation_to_json(const ConePermutationResult& r);
Json stage_certificate_to_json(const StageCertificate& c);
Json motion_rule_to_json(const MotionRule& r);
MotionRule motion_rule_from_json(const Json& j);
// Without the certificates; those go out one per line.
Json build_result_to_json(const StagedBuildResult& r);
Json alpha_order_to_json(const AlphaOrderResult& r);
Json move_witness_to_json(const MoveWitness& w);

}  // namespace treeforge
