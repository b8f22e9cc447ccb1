// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nrsense/eval.hpp"

namespace nrs {

// flat dotted-key configuration, e.g. "prs.comb_size = 2"
using KvMap = std::map<std::string, std::string>;

KvMap parse_config_text(std::istream& in);

// Loads a config file; *.json files are treated as run manifests and the
// embedded "config" object is extracted.
KvMap load_config_file(const std::string& path);

// applies "key=value" strings on top of the map
void apply_overrides(KvMap& kv, std::span<const std::string> overrides);

// Builds a scenario from keys over defaults; throws std::invalid_argument
// naming the offending key on unknown keys or bad values.
ScenarioConfig scenario_from_kv(const KvMap& kv);

// Fully resolved snapshot (defaults expanded); round-trips through
// scenario_from_kv bit-identically.
KvMap scenario_to_kv(const ScenarioConfig& scn);

}  // namespace nrs
