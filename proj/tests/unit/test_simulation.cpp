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

#include <gtest/gtest.h>

#include "anytime/error.hpp"
#include "anytime/simulation.hpp"
#include "common.hpp"

namespace anytime {
namespace {

using testing::audit_config;
using testing::constant_stream;

Scenario stake_scenario(DistributionSpec dist, double c) {
  Scenario sc;
  sc.id = "t";
  sc.dist = std::move(dist);
  sc.cfg = audit_config();
  sc.policy = ConstantStake{c};
  sc.runs = 200;
  sc.seed = 20240601;
  return sc;
}

TEST(Sampler, SameSeedAndRunRepeat) {
  Sampler a(BetaDist{2, 98}, 5, 3);
  Sampler b(BetaDist{2, 98}, 5, 3);
  Sampler c(BetaDist{2, 98}, 5, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.next();
    EXPECT_EQ(x, b.next());
    differs = differs || x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Sampler, SupportAndMoments) {
  const std::size_t n = 200000;
  const auto alt = sample(Alt{0.02}, n, 1);
  const auto beta = sample(BetaDist{2, 98}, n, 2);
  const auto scaled = sample(ScaledAlt{0.2, 0.1}, n, 3);
  const auto finite = sample(FiniteSupport{{0.0, 0.5, 1.0}, {0.2, 0.5, 0.3}}, n, 4);
  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  for (double x : alt) EXPECT_TRUE(x == 0.0 || x == 1.0);
  for (double x : scaled) EXPECT_TRUE(x == 0.0 || x == 0.2);
  for (double x : finite) EXPECT_TRUE(x == 0.0 || x == 0.5 || x == 1.0);
  for (double x : beta) EXPECT_TRUE(x >= 0.0 && x <= 1.0);
  // Five standard errors.
  EXPECT_NEAR(mean_of(alt), 0.02, 5 * std::sqrt(0.02 * 0.98 / n));
  EXPECT_NEAR(mean_of(beta), 0.02, 5 * 0.0139 / std::sqrt(n));
  EXPECT_NEAR(mean_of(scaled), 0.02, 5 * 0.06 / std::sqrt(n));
  EXPECT_NEAR(mean_of(finite), 0.55, 5 * 0.35 / std::sqrt(n));
}

TEST(RunTrial, ConstantStreamRejection) {
  Scenario sc = stake_scenario(PointMass{0.02}, 0.6);
  const TrialRecord r = run_trial(sc, constant_stream(0.02, 1000));
  ASSERT_TRUE(r.n_reject);
  EXPECT_EQ(*r.n_reject, 160u);
  EXPECT_EQ(r.steps, 160u);
  EXPECT_FALSE(r.capped);
  EXPECT_FALSE(r.n_precision);
  EXPECT_NEAR(r.mean_at_stop, 0.02, 1e-16);
}

TEST(RunTrial, PrecisionAndRejectionTogether) {
  Scenario sc = stake_scenario(PointMass{0.02}, 1.0);
  sc.policy = MixtureSpec::uniform(0.6, 1.0);
  sc.stop_rule = StopRule::kBoth;
  const TrialRecord r = run_trial(sc, constant_stream(0.02, 1000));
  ASSERT_TRUE(r.n_precision && r.n_reject);
  EXPECT_EQ(*r.n_precision, 70u);
  EXPECT_EQ(*r.n_reject, 117u);
  EXPECT_EQ(r.steps, 117u);
  EXPECT_NEAR(r.mean_at_stop, 0.02, 1e-16);
  EXPECT_NEAR(r.bound_at_stop, 0.069437224622584424, 2e-8);

  sc.stop_rule = StopRule::kPrecision;
  const TrialRecord p = run_trial(sc, constant_stream(0.02, 1000));
  EXPECT_EQ(p.n_precision, std::optional<std::size_t>(70));
  EXPECT_EQ(p.steps, 70u);
}

TEST(RunTrial, MinimumSampleSizeHoldsPrecisionBack) {
  Scenario sc = stake_scenario(PointMass{0.02}, 1.0);
  sc.policy = MixtureSpec::uniform(0.6, 1.0);
  sc.stop_rule = StopRule::kPrecision;
  sc.min_n = 90;
  EXPECT_EQ(run_trial(sc, constant_stream(0.02, 1000)).n_precision,
            std::optional<std::size_t>(90));
}

TEST(RunTrial, CappedWhenStreamEnds) {
  Scenario sc = stake_scenario(PointMass{0.02}, 0.6);
  const TrialRecord r = run_trial(sc, constant_stream(0.02, 100));
  EXPECT_TRUE(r.capped);
  EXPECT_FALSE(r.n_reject);
  EXPECT_EQ(r.steps, 100u);
}

TEST(RunTrial, RandomTrialIsDeterministic) {
  const Scenario sc = stake_scenario(Alt{0.02}, 0.6);
  EXPECT_EQ(run_trial(sc, 7), run_trial(sc, 7));
}

TEST(Experiment, ThreadCountDoesNotChangeResults) {
  Scenario sc = stake_scenario(Alt{0.02}, 0.6);
  sc.runs = 64;
  const RunSummary one = experiment(sc, 1);
  const RunSummary four = experiment(sc, 4);
  EXPECT_EQ(one, four);
  EXPECT_EQ(summary_csv_row(sc, one), summary_csv_row(sc, four));
}

TEST(Experiment, ReferenceMeanSampleNumbers) {
  const struct {
    DistributionSpec dist;
    double c, mean, sd;
  } rows[] = {{Alt{0.02}, 0.6, 245.9, 169.2},
              {BetaDist{2, 98}, 1.0, 97.2, 4.5},
              {ScaledAlt{0.2, 0.1}, 1.0, 104.0, 23.4}};
  for (const auto& row : rows) {
    const RunSummary s = experiment(stake_scenario(row.dist, row.c), 0);
    EXPECT_EQ(s.n.count, 200u);
    EXPECT_EQ(s.not_stopped_count, 0u);
    EXPECT_NEAR(s.n.mean, row.mean, 3 * row.sd / std::sqrt(200.0)) << describe(row.dist);
  }
}

TEST(Experiment, SizeUnderTheNull) {
  Scenario sc = stake_scenario(Alt{0.05}, 0.6);
  sc.runs = 2000;
  sc.cap = 2000;
  const RunSummary s = experiment(sc, 0);
  EXPECT_LE(s.reject_rate, 0.05 + 3 * std::sqrt(0.05 * 0.95 / 2000));
  EXPECT_EQ(s.not_stopped_count + s.n.count, 2000u);
}

TEST(Summarize, QuantilesAndRates) {
  Scenario sc = stake_scenario(Alt{0.02}, 0.6);
  std::vector<TrialRecord> trials;
  for (std::size_t n : {10u, 20u, 30u, 40u}) {
    TrialRecord r;
    r.n_reject = n;
    r.steps = n;
    r.mean_at_stop = 0.01 * static_cast<double>(n);
    trials.push_back(r);
  }
  TrialRecord capped;
  capped.capped = true;
  capped.steps = 100;
  trials.push_back(capped);
  const RunSummary s = summarize(sc, trials);
  EXPECT_EQ(s.runs, 5u);
  EXPECT_EQ(s.n.count, 4u);
  EXPECT_DOUBLE_EQ(s.n.mean, 25.0);
  EXPECT_EQ(s.n.q50, 20.0);
  EXPECT_EQ(s.n.q75, 30.0);
  EXPECT_EQ(s.n.q90, 40.0);
  EXPECT_DOUBLE_EQ(s.reject_rate, 0.8);
  EXPECT_EQ(s.not_stopped_count, 1u);
  EXPECT_DOUBLE_EQ(s.mean_tbar, 0.25);
}

TEST(Scenario, Validation) {
  Scenario sc = stake_scenario(Alt{0.02}, 0.6);
  EXPECT_NO_THROW(sc.validate());
  sc.runs = 0;
  EXPECT_THROW(sc.validate(), Error);
  sc = stake_scenario(PointMass{1.5}, 0.6);
  EXPECT_THROW(sc.validate(), Error);
  sc = stake_scenario(Alt{0.02}, 0.6);
  sc.stop_rule = StopRule::kPrecision;
  sc.precision_m = 0.0;
  EXPECT_THROW(sc.validate(), Error);
}

TEST(StopRule, RoundTrip) {
  for (StopRule r : {StopRule::kRejectAtAlpha, StopRule::kPrecision, StopRule::kBoth}) {
    EXPECT_EQ(parse_stop_rule(to_string(r)), r);
  }
  EXPECT_THROW(parse_stop_rule("never"), Error);
}

TEST(SummaryCsv, HeaderMatchesRowWidth) {
  const Scenario sc = stake_scenario(Alt{0.02}, 0.6);
  Scenario small = sc;
  small.runs = 10;
  const std::string row = summary_csv_row(small, experiment(small));
  auto commas = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  EXPECT_EQ(commas(row), commas(summary_csv_header()));
  EXPECT_EQ(row.rfind("t,alt:0.02,c=0.6,reject,10,", 0), 0u) << row;
}

}  // namespace
}  // namespace anytime
