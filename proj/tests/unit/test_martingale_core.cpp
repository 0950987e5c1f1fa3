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

#include <random>

#include "anytime/error.hpp"
#include "anytime/kernels.hpp"
#include "anytime/martingale.hpp"
#include "anytime/sequential.hpp"
#include "common.hpp"

namespace anytime {
namespace {

using testing::audit_config;

TEST(Factor, UpperSideFormula) {
  const TestConfig cfg = audit_config();
  EXPECT_NEAR(factor(Side::kUpper, 0.0, cfg, 0.6), 1.0315789473684210526, 1e-15);
  EXPECT_DOUBLE_EQ(factor(Side::kUpper, 1.0, cfg, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(factor(Side::kUpper, 0.05, cfg, 0.7), 1.0);
}

TEST(Factor, LowerSideFormula) {
  TestConfig cfg = audit_config();
  cfg.mu = 0.5;
  cfg.side = LowerNull{};
  // 1 - c (mu - t)/(mu - tau0)
  EXPECT_DOUBLE_EQ(factor(Side::kLower, 0.0, cfg, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(factor(Side::kLower, 1.0, cfg, 0.5), 1.5);
}

TEST(Step, SingleObservationLogValue) {
  const TestConfig cfg = audit_config();
  const MartingaleState s = step(MartingaleState{}, 0.0, 1.0, cfg);
  EXPECT_EQ(s.k, 1u);
  EXPECT_NEAR(s.log_m, 0.051293294387550533, 1e-15);
  EXPECT_EQ(s.log_m, s.log_m_max);
}

TEST(Step, AbsorptionIsSticky) {
  const TestConfig cfg = audit_config();
  MartingaleState s = step(MartingaleState{}, 0.0, 1.0, cfg);
  const double before = s.log_m_max;
  s = step(s, 1.0, 1.0, cfg);
  EXPECT_TRUE(s.absorbed);
  EXPECT_EQ(s.log_m, kNegInf);
  EXPECT_EQ(s.log_m_max, before);
  s = step(s, 0.0, 1.0, cfg);
  EXPECT_EQ(s.k, 3u);
  EXPECT_EQ(s.log_m, kNegInf);
}

TEST(Step, RejectsOutOfBoundsWithIndex) {
  const TestConfig cfg = audit_config();
  MartingaleState s = step(MartingaleState{}, 0.0, 0.5, cfg);
  try {
    step(s, 1.5, 0.5, cfg);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfBounds);
    ASSERT_TRUE(e.index());
    EXPECT_EQ(*e.index(), 2u);
  }
}

TEST(Step, RejectsInvalidStake) {
  const TestConfig cfg = audit_config();
  try {
    step(MartingaleState{}, 0.0, 1.2, cfg);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidStake);
  }
  EXPECT_THROW(step(MartingaleState{}, 0.0, -0.1, cfg), Error);
}

TEST(Decision, TieRejects) {
  EXPECT_EQ(decision(std::log(20.0), 0.05), Decision::kReject);
  EXPECT_EQ(decision(std::nextafter(std::log(20.0), 0.0), 0.05), Decision::kContinue);
}

TEST(BatchStep, MaximumOnlyAtBatchEnd) {
  const TestConfig cfg = audit_config();
  // Up then down inside one batch: the intermediate peak is not credited.
  const std::vector<double> ts{0.0, 0.0, 0.0, 1.0};
  const MartingaleState batched = batch_step(MartingaleState{}, ts, 0.5, cfg);
  MartingaleState stepped;
  for (double t : ts) stepped = step(stepped, t, 0.5, cfg);
  EXPECT_EQ(batched.log_m, stepped.log_m);
  EXPECT_LT(batched.log_m_max, stepped.log_m_max);
  EXPECT_EQ(batched.log_m_max, std::max(0.0, batched.log_m));
}

TEST(TwoSided, CombinesLegs) {
  TestConfig cfg = audit_config();
  cfg.mu = 0.5;
  cfg.side = TwoSided{0.3};
  MartingaleState plus;
  MartingaleState minus;
  for (double t : {0.1, 0.9, 0.2}) {
    plus = step(plus, t, 0.4, cfg, Side::kUpper);
    minus = step(minus, t, 0.4, cfg, Side::kLower);
  }
  const double expected = std::log(0.3 * std::exp(plus.log_m) + 0.7 * std::exp(minus.log_m));
  EXPECT_NEAR(two_sided_value(plus, minus, 0.3), expected, 1e-14);
  EXPECT_EQ(two_sided_value(plus, minus, 1.0), plus.log_m);
  EXPECT_EQ(two_sided_value(plus, minus, 0.0), minus.log_m);
  minus = step(minus, 0.5, 0.4, cfg, Side::kLower);
  try {
    two_sided_value(plus, minus, 0.3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStreamDesync);
  }
}

TEST(Config, ValidationNamesFields) {
  TestConfig cfg = audit_config();
  cfg.mu = 1.2;
  cfg.alpha = 1.5;
  try {
    cfg.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
    EXPECT_NE(std::string(e.what()).find("mu"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos);
  }
}

// E[factor] = 1 under any law with mean mu, for every stake.
TEST(Property, MartingaleIdentity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const TestConfig cfg = audit_config();
  for (int trial = 0; trial < 200; ++trial) {
    // Two-point law on [0,1] with mean exactly mu: a < mu < b.
    const double a = u(rng) * cfg.mu;
    const double b = cfg.mu + u(rng) * (1.0 - cfg.mu);
    const double p = (cfg.mu - a) / (b - a);
    const double c = u(rng);
    const double mean_factor =
        (1.0 - p) * factor(Side::kUpper, a, cfg, c) + p * factor(Side::kUpper, b, cfg, c);
    EXPECT_NEAR(mean_factor, 1.0, 1e-12);
    TestConfig lower = cfg;
    lower.side = LowerNull{};
    const double mean_lower =
        (1.0 - p) * factor(Side::kLower, a, lower, c) + p * factor(Side::kLower, b, lower, c);
    EXPECT_NEAR(mean_lower, 1.0, 1e-12);
  }
}

// ---------------------------------------------------------------------------

TEST(Sequential, ConstantStakeMatchesStepFold) {
  const TestConfig cfg = audit_config();
  SequentialTest test(cfg, ConstantStake{0.6});
  MartingaleState s;
  for (double t : {0.0, 0.3, 0.02, 1.0, 0.0}) {
    s = step(s, t, 0.6, cfg);
    const TestSnapshot& snap = test.observe(t);
    EXPECT_EQ(snap.log_m, s.log_m);
    EXPECT_EQ(snap.log_m_max, s.log_m_max);
    EXPECT_EQ(snap.absorbed, s.absorbed);
    ASSERT_TRUE(snap.stake);
    EXPECT_EQ(*snap.stake, 0.6);
  }
}

TEST(Sequential, ScheduleRepeatsLastStake) {
  const TestConfig cfg = audit_config();
  SequentialTest test(cfg, StakeSchedule{{0.2, 0.4}});
  EXPECT_EQ(test.next_stake(), 0.2);
  test.observe(0.0);
  EXPECT_EQ(test.next_stake(), 0.4);
  test.observe(0.0);
  EXPECT_EQ(test.next_stake(), 0.4);
}

TEST(Sequential, PolicySwitchComposesMultiplicatively) {
  const TestConfig cfg = audit_config();
  const std::vector<double> first{0.02, 0.0, 0.1, 0.0, 0.02, 0.0, 0.0, 0.3, 0.0, 0.0};
  const std::vector<double> second{0.0, 0.02, 0.0, 0.5, 0.0};
  SequentialTest test(cfg, ConstantStake{0.6});
  for (double t : first) test.observe(t);
  const double log_m_n = test.snapshot().log_m;
  test.switch_policy(MixtureSpec::uniform(0.6, 1.0));
  SequentialTest fresh(cfg, MixtureSpec::uniform(0.6, 1.0));
  for (double t : second) {
    test.observe(t);
    fresh.observe(t);
    EXPECT_NEAR(test.snapshot().log_m, log_m_n + fresh.snapshot().log_m, 1e-13);
  }
}

TEST(Sequential, RejectsInvalidPolicies) {
  const TestConfig cfg = audit_config();
  EXPECT_THROW(SequentialTest(cfg, ConstantStake{1.5}), Error);
  EXPECT_THROW(SequentialTest(cfg, StakeSchedule{}), Error);
  EXPECT_THROW(SequentialTest(cfg, MixtureSpec::uniform(-1.0, 1.0)), Error);
  SequentialTest test(cfg, ConstantStake{0.5});
  test.observe(0.0);
  EXPECT_THROW(test.switch_policy(ConstantStake{2.0}), Error);
  EXPECT_EQ(test.policy(), StakePolicy{ConstantStake{0.5}});
}

TEST(Sequential, TwoSidedConfiguration) {
  TestConfig cfg = audit_config();
  cfg.mu = 0.5;
  cfg.side = TwoSided{0.5};
  SequentialTest test(cfg, ConstantStake{0.5});
  MartingaleState plus;
  MartingaleState minus;
  for (double t : {0.9, 0.8, 1.0, 0.95}) {
    plus = step(plus, t, 0.5, cfg, Side::kUpper);
    minus = step(minus, t, 0.5, cfg, Side::kLower);
    EXPECT_NEAR(test.observe(t).log_m, two_sided_value(plus, minus, 0.5), 1e-14);
  }
}

TEST(Sequential, PowerFamilyStakeAtMu) {
  const TestConfig cfg = audit_config();
  const PowerFamily p{0.5, 1.0, 0.0, 0.05};
  SequentialTest test(cfg, p);
  EXPECT_DOUBLE_EQ(test.next_stake(), 0.5 * 0.95);
}

// ---------------------------------------------------------------------------

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!kernels::avx2_table()) GTEST_SKIP() << "AVX2 not available";
  }
  const kernels::KernelTable& scalar = kernels::scalar_table();
  const kernels::KernelTable& simd() { return *kernels::avx2_table(); }
};

std::vector<double> random_vector(std::size_t n, double lo, double hi, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

TEST_F(KernelEquivalence, AccumulateLogAffine) {
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 64u, 67u}) {
    const auto stakes = random_vector(n, -1.0, 1.0, 3);
    for (double z : {-0.9, -0.05, 0.0, 0.3, 1.0}) {
      std::vector<double> a(n, 0.25);
      std::vector<double> b(n, 0.25);
      scalar.accumulate_log_affine(a.data(), stakes.data(), n, z, 3.0);
      simd().accumulate_log_affine(b.data(), stakes.data(), n, z, 3.0);
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(a[i], b[i], 4e-15 * std::max(1.0, std::abs(a[i]))) << "n=" << n << " i=" << i;
      }
    }
  }
}

TEST_F(KernelEquivalence, ZeroFactorGivesMinusInfinity) {
  const std::vector<double> stakes{1.0, 0.5, 1.0, 0.25, 1.0};
  std::vector<double> a(5, 0.0);
  std::vector<double> b(5, 0.0);
  scalar.accumulate_log_affine(a.data(), stakes.data(), 5, 1.0, 1.0);
  simd().accumulate_log_affine(b.data(), stakes.data(), 5, 1.0, 1.0);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(std::isinf(a[i]), std::isinf(b[i]));
    if (!std::isinf(a[i])) EXPECT_NEAR(a[i], b[i], 1e-15);
  }
  EXPECT_EQ(b[0], kNegInf);
}

TEST_F(KernelEquivalence, DotLogAffine) {
  for (std::size_t n : {1u, 2u, 5u, 33u, 1000u}) {
    const auto w = random_vector(n, 0.0, 5.0, 7);
    const auto zs = random_vector(n, -1.0, 1.0, 8);
    for (double c : {0.0, 0.2, 0.99}) {
      const double a = scalar.dot_log_affine(w.data(), zs.data(), n, c);
      const double b = simd().dot_log_affine(w.data(), zs.data(), n, c);
      EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_F(KernelEquivalence, LogAffine) {
  const auto zs = random_vector(37, -1.0, 1.0, 9);
  std::vector<double> a(37);
  std::vector<double> b(37);
  scalar.log_affine(a.data(), zs.data(), 37, 0.7);
  simd().log_affine(b.data(), zs.data(), 37, 0.7);
  for (std::size_t i = 0; i < 37; ++i) EXPECT_NEAR(a[i], b[i], 1e-15 * std::max(1.0, std::abs(a[i])));
}

TEST_F(KernelEquivalence, LogSumExpAndMoments) {
  for (std::size_t n : {1u, 4u, 9u, 128u}) {
    auto a = random_vector(n, -800.0, 5.0, 10);
    const auto b = random_vector(n, -3.0, 0.0, 11);
    const auto x = random_vector(n, -1.0, 1.0, 12);
    if (n > 2) a[1] = kNegInf;
    const double la = scalar.log_sum_exp(a.data(), b.data(), n);
    const double lb = simd().log_sum_exp(a.data(), b.data(), n);
    EXPECT_NEAR(la, lb, 1e-13 * std::max(1.0, std::abs(la)));
    double s0a = 0, s1a = 0, s0b = 0, s1b = 0;
    scalar.exp_moments(a.data(), b.data(), x.data(), n, la, &s0a, &s1a);
    simd().exp_moments(a.data(), b.data(), x.data(), n, la, &s0b, &s1b);
    EXPECT_NEAR(s0a, s0b, 1e-13);
    EXPECT_NEAR(s1a, s1b, 1e-13);
  }
  std::vector<double> all(6, kNegInf);
  std::vector<double> zero(6, 0.0);
  EXPECT_EQ(simd().log_sum_exp(all.data(), zero.data(), 6), kNegInf);
  EXPECT_EQ(scalar.log_sum_exp(all.data(), zero.data(), 6), kNegInf);
}

TEST_F(KernelEquivalence, WholeTestAgreesAcrossTables) {
  const TestConfig cfg = audit_config();
  auto run = [&](const kernels::KernelTable& table) {
    const kernels::KernelTable& previous = kernels::set_active(table);
    SequentialTest test(cfg, MixtureSpec::uniform(0.6, 1.0));
    double out = 0.0;
    for (int i = 0; i < 117; ++i) out = test.observe(0.02).log_m;
    kernels::set_active(previous);
    return out;
  };
  EXPECT_NEAR(run(scalar), run(simd()), 1e-12);
}

}  // namespace
}  // namespace anytime
