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

#include "anytime/config.hpp"
#include "anytime/martingale.hpp"
#include "anytime/mixture.hpp"
#include "anytime/policy.hpp"

namespace anytime {

struct TestSnapshot {
  std::size_t k = 0;
  double log_m = 0.0;
  double log_m_max = 0.0;
  bool absorbed = false;
  Decision decision = Decision::kContinue;
  // Stake applied to the latest observation (effective stake for mixtures,
  // upper leg for two-sided tests); nullopt before the first observation.
  std::optional<double> stake;

  bool operator==(const TestSnapshot&) const = default;
};

// A test martingale at the configured mu driven by a stake policy. Two-sided
// configurations run an upper and a lower leg on the same stream and combine
// them as rho+ M+ + rho- M-.
//
// switch_policy() starts a fresh family N at 1 for the coming observations and
// multiplies it onto the value accumulated so far (M_{n+l} = M_n N_l).
class SequentialTest {
 public:
  SequentialTest(TestConfig cfg, StakePolicy policy,
                 std::size_t node_count = kDefaultMixtureNodes);

  const TestSnapshot& observe(double t);
  void switch_policy(StakePolicy policy);

  // Stake the current policy will apply to the next observation (upper leg).
  double next_stake() const;

  const TestSnapshot& snapshot() const { return snapshot_; }
  const TestConfig& config() const { return cfg_; }
  const StakePolicy& policy() const { return policy_; }

 private:
  struct Leg {
    Side side = Side::kUpper;
    double frozen_log = 0.0;  // log M carried over from earlier policies
    MartingaleState fixed;    // current segment, fixed-stake policies
    std::optional<MixtureState> mixture;

    double log_value() const;
  };

  void reset_legs();
  double stake_for(const Leg& leg) const;
  void advance(Leg& leg, double t, double stake);

  TestConfig cfg_;
  StakePolicy policy_;
  std::size_t node_count_;
  std::size_t segment_start_ = 0;
  std::optional<Leg> plus_;
  std::optional<Leg> minus_;
  TestSnapshot snapshot_;
};

// Validates a policy for use with this configuration; throws
// Error(kInvalidPolicy) describing the first problem.
void validate_policy(const StakePolicy& policy, const TestConfig& cfg);

}  // namespace anytime
