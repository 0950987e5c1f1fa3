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

#include <ostream>
#include <string>
#include <vector>

namespace anytime {

inline constexpr const char* kConfigEnv = "ANYTIME_CONFIG";
inline constexpr const char* kTokenEnv = "ANYTIME_TOKEN";

// Runs one CLI invocation; args excludes the program name.
// Exit codes: 0 ok, 2 usage error, 1 data error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace anytime
