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
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "anytime/config.hpp"
#include "anytime/distribution.hpp"
#include "anytime/policy.hpp"

namespace anytime {

// RejectAtAlpha: stop when the test at cfg.mu rejects.
// Precision: stop at the first k >= min_n with U_k - mean_k <= m.
// Both: run until both events happened (or the cap).
enum class StopRule { kRejectAtAlpha, kPrecision, kBoth };

const char* to_string(StopRule rule);
StopRule parse_stop_rule(const std::string& text);

struct Scenario {
  std::string id = "scenario";
  DistributionSpec dist = PointMass{0.0};
  TestConfig cfg;
  StakePolicy policy = ConstantStake{0.5};
  StopRule stop_rule = StopRule::kRejectAtAlpha;
  double precision_m = 0.05;
  std::size_t min_n = 50;
  std::size_t cap = 100000;
  std::size_t runs = 200;
  std::uint64_t seed = 1;

  // Throws Error(kInvalidConfig).
  void validate() const;
};

// Draws from a law using one generator per run: seed_seq{seed, run}.
class Sampler {
 public:
  Sampler(DistributionSpec dist, std::uint64_t seed, std::uint64_t run = 0);
  double next();

 private:
  DistributionSpec dist_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::optional<std::gamma_distribution<double>> gamma_a_;
  std::optional<std::gamma_distribution<double>> gamma_b_;
  std::vector<double> cdf_;
  std::vector<double> points_;
};

std::vector<double> sample(const DistributionSpec& dist, std::size_t n, std::uint64_t seed);

struct TrialRecord {
  std::optional<std::size_t> n_reject;
  std::optional<std::size_t> n_precision;
  std::size_t steps = 0;     // observations drawn
  bool capped = false;       // stop rule not met within the cap
  double mean_at_stop = 0.0; // sample mean at the stopping step
  double bound_at_stop = 0.0;

  bool operator==(const TrialRecord&) const = default;
};

// Runs trial `run` of the scenario (its own random substream).
TrialRecord run_trial(const Scenario& scenario, std::uint64_t run = 0);
// Same, over a given observation stream; capped when the stream runs out.
TrialRecord run_trial(const Scenario& scenario, const std::vector<double>& stream);

struct NStats {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double q90 = 0.0;

  bool operator==(const NStats&) const = default;
};

struct RunSummary {
  std::size_t runs = 0;
  // Sample numbers at the stop rule's event (rejection for kBoth), over the
  // runs that reached it.
  NStats n;
  // Precision-stop sample numbers (kPrecision and kBoth).
  NStats n_precision;
  double mean_tbar = 0.0;
  double sd_tbar = 0.0;
  double reject_rate = 0.0;
  double reject_se = 0.0;
  std::size_t not_stopped_count = 0;

  bool operator==(const RunSummary&) const = default;
};

// threads = 0 picks the hardware concurrency. Results do not depend on it.
RunSummary experiment(const Scenario& scenario, unsigned threads = 1);

RunSummary summarize(const Scenario& scenario, const std::vector<TrialRecord>& trials);

std::string summary_csv_header();
std::string summary_csv_row(const Scenario& scenario, const RunSummary& summary);

}  // namespace anytime
