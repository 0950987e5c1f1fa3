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

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "anytime/config.hpp"

namespace anytime {

// Two-point law on {0, 1} with P{T = 1} = nu.
struct Alt {
  double nu = 0.0;
  bool operator==(const Alt&) const = default;
};
// T = value with probability prob, else 0 (e.g. 5T ~ Alt(0.1) is {0.2, 0.1}).
struct ScaledAlt {
  double value = 0.0;
  double prob = 0.0;
  bool operator==(const ScaledAlt&) const = default;
};
// Beta(a, b) on [0, 1].
struct BetaDist {
  double a = 1.0;
  double b = 1.0;
  bool operator==(const BetaDist&) const = default;
};
struct PointMass {
  double t = 0.0;
  bool operator==(const PointMass&) const = default;
};
struct FiniteSupport {
  std::vector<double> points;
  std::vector<double> probs;
  bool operator==(const FiniteSupport&) const = default;
};

using DistributionSpec = std::variant<Alt, ScaledAlt, BetaDist, PointMass, FiniteSupport>;

double mean(const DistributionSpec& dist);
double lower_support(const DistributionSpec& dist);
double upper_support(const DistributionSpec& dist);

// Support points with positive probability, duplicates merged, ascending.
// nullopt for continuous laws.
std::optional<FiniteSupport> as_finite(const DistributionSpec& dist);

// Throws Error(kInvalidConfig) for malformed parameters, probabilities that do
// not sum to 1, or support outside the configured bounds (when cfg given).
void validate(const DistributionSpec& dist, const TestConfig* cfg = nullptr);

// "alt:0.02", "scaled-alt:0.2:0.1", "beta:2:98", "point:0.02",
// "finite:0,0.5,1:0.5,0.3,0.2". Throws Error(kParse).
DistributionSpec parse_distribution(std::string_view text);
std::string describe(const DistributionSpec& dist);

}  // namespace anytime
