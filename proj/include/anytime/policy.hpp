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
#include <variant>
#include <vector>

#include "anytime/config.hpp"

namespace anytime {

struct UniformDensity {
  bool operator==(const UniformDensity&) const = default;
};

// Discrete mixing density: point masses `weights` at stakes `nodes`.
struct WeightedNodes {
  std::vector<double> nodes;
  std::vector<double> weights;
  bool operator==(const WeightedNodes&) const = default;
};

// Mixing density pi over stakes in [lo, hi] with -1 <= lo < hi <= 1.
// Negative stakes denote the lower-side factor with stake |c|.
struct MixtureSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::variant<UniformDensity, WeightedNodes> density = UniformDensity{};

  bool operator==(const MixtureSpec&) const = default;

  static MixtureSpec uniform(double lo, double hi) { return MixtureSpec{lo, hi, UniformDensity{}}; }

  // Throws Error(kInvalidMixture).
  void validate() const;
  // Additionally requires support within [0, 1].
  void validate_one_sided() const;
  bool two_sided() const { return lo < 0.0 && hi > 0.0; }
  // Reflects the support through 0: a one-sided upper mixture becomes the
  // corresponding lower-side mixture.
  MixtureSpec mirrored() const;
};

struct ConstantStake {
  double c = 0.0;
  bool operator==(const ConstantStake&) const = default;
};

// Stake c_{k-1} = stakes[k-1]; the last entry repeats once the list runs out.
struct StakeSchedule {
  std::vector<double> stakes;
  bool operator==(const StakeSchedule&) const = default;
  double stake_for_step(std::size_t k) const;
};

// mu-dependent stake c(mu) = d (tau1 - mu)^r / (mu - tau0)^s, meant for upper
// bounds mu >= tau0 + m only.
struct PowerFamily {
  double d = 0.0;
  double r = 0.0;
  double s = 0.0;
  double m = 0.0;
  bool operator==(const PowerFamily&) const = default;

  double stake(double mu, const TestConfig& cfg) const;
  // Largest d keeping c(tau0 + m) <= 1: m^s / (tau1 - tau0 - m)^r.
  double d_cap(const TestConfig& cfg) const;
  double min_mu(const TestConfig& cfg) const;
};

// How c_{k-1} is chosen for a test of H0 at a fixed mu, and equally how the
// family M^mu is built when mu varies (confidence bounds).
using StakePolicy = std::variant<ConstantStake, StakeSchedule, PowerFamily, MixtureSpec>;

const char* policy_kind(const StakePolicy& policy);

}  // namespace anytime
