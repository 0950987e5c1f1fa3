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

#include <string>

#include "anytime/policy.hpp"

namespace anytime {

// Nine significant digits; "inf" / "-inf" for infinities.
std::string format_number(double x);

// Shortest text that reads back to the same double.
std::string format_exact(double x);

// "c=0.6", "schedule[3]", "power:d:r:s:m", "uniform:0.6:1", "nodes[5]".
std::string describe_policy(const StakePolicy& policy);

// Quotes a CSV field when it holds a comma or a quote.
std::string csv_field(const std::string& text);

}  // namespace anytime
