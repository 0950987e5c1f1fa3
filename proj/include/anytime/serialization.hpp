// Copyright 2026 The Anytime Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

#include "anytime/config.hpp"
#include "anytime/distribution.hpp"
#include "anytime/martingale.hpp"
#include "anytime/policy.hpp"
#include "anytime/sequential.hpp"
#include "anytime/simulation.hpp"

namespace anytime {

using Json = nlohmann::json;

// Doubles as JSON numbers (shortest round-trip text); infinities as "inf" /
// "-inf" strings.
Json number_to_json(double x);
double number_from_json(const Json& j, const std::string& field);

Json to_json(const TestConfig& cfg);
TestConfig config_from_json(const Json& j);

Json to_json(const MartingaleState& state);
MartingaleState state_from_json(const Json& j);

// {"support": [a, b], "density": "uniform" | {"nodes": [...], "weights": [...]}}
Json to_json(const MixtureSpec& spec);
MixtureSpec mixture_from_json(const Json& j);

// {"kind": "constant", "c": x} | {"kind": "schedule", "stakes": [...]} |
// {"kind": "power", "d", "r", "s", "m"} | {"kind": "mixture", <MixtureSpec>}
Json to_json(const StakePolicy& policy);
StakePolicy policy_from_json(const Json& j);

Json to_json(const TestSnapshot& snap);
TestSnapshot snapshot_from_json(const Json& j);

// {"id", "dist": "alt:0.02", "config": {...}, "policy": {...}, "stop_rule",
//  "precision_m", "min_n", "cap", "runs", "seed"}
Scenario scenario_from_json(const Json& j);
Json to_json(const Scenario& scenario);

// One value per non-blank line: either a JSON object {"t": x} or a bare number
// (single-column CSV without header). Throws Error(kParse, index = line).
std::vector<double> read_observations(std::istream& in);

}  // namespace anytime
