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

#include <cstddef>
#include <optional>
#include <variant>

namespace anytime {

// Which null a single-sided factor tests against.
//   kUpper: H0: E(T) >= mu, needs tau1 (factor 1 - c (t - mu) / (tau1 - mu)).
//   kLower: H0: E(T) <= mu, needs tau0 (factor 1 - c (mu - t) / (mu - tau0)).
enum class Side { kUpper, kLower };

struct UpperNull {
  bool operator==(const UpperNull&) const = default;
};
struct LowerNull {
  bool operator==(const LowerNull&) const = default;
};
// H0: E(T) = mu via rho_plus * M+ + (1 - rho_plus) * M-.
struct TwoSided {
  double rho_plus = 0.5;
  bool operator==(const TwoSided&) const = default;
};
using NullSide = std::variant<UpperNull, LowerNull, TwoSided>;

struct TestConfig {
  double mu = 0.0;
  std::optional<double> tau0;
  std::optional<double> tau1;
  double alpha = 0.05;
  NullSide side = UpperNull{};

  bool operator==(const TestConfig&) const = default;

  // Throws Error(kInvalidConfig) naming every offending field.
  void validate() const;
  // Only the support bounds and alpha; used by the confidence routines where
  // mu is the unknown being searched for.
  void validate_bounds() const;
  // Throws Error(kOutOfBounds, index) when t falls outside a configured bound.
  void check_observation(double t, std::size_t index) const;

  double log_threshold() const;
  double rho_plus() const;
  TestConfig with_mu(double new_mu) const;
};

}  // namespace anytime
