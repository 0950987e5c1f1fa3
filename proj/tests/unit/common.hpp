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

#include <cmath>
#include <vector>

#include "anytime/config.hpp"

namespace anytime::testing {

// The audit setting used throughout: H0: E(T) >= 0.05 for T in [0, 1].
inline TestConfig audit_config(double alpha = 0.05) {
  TestConfig cfg;
  cfg.mu = 0.05;
  cfg.tau0 = 0.0;
  cfg.tau1 = 1.0;
  cfg.alpha = alpha;
  return cfg;
}

inline std::vector<double> constant_stream(double t, std::size_t n) {
  return std::vector<double>(n, t);
}

}  // namespace anytime::testing
