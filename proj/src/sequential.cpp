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

#include "anytime/sequential.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anytime/detail/overloaded.hpp"
#include "anytime/error.hpp"

namespace anytime {

using detail::Overloaded;

void validate_policy(const StakePolicy& policy, const TestConfig& cfg) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidPolicy, msg); };
  std::visit(Overloaded{
                 [&](const ConstantStake& p) {
                   if (!(p.c >= 0.0 && p.c <= 1.0)) fail("constant stake must lie in [0,1]");
                 },
                 [&](const StakeSchedule& p) {
                   if (p.stakes.empty()) fail("stake schedule is empty");
                   for (double c : p.stakes) {
                     if (!(c >= 0.0 && c <= 1.0)) fail("scheduled stakes must lie in [0,1]");
                   }
                 },
                 [&](const PowerFamily& p) {
                   if (!cfg.tau0 || !cfg.tau1) fail("power family needs tau0 and tau1");
                   const double c = p.stake(cfg.mu, cfg);
                   if (!(c >= 0.0 && c <= 1.0)) {
                     fail("power family stake at mu is " + std::to_string(c) + ", outside [0,1]");
                   }
                 },
                 [&](const MixtureSpec& p) {
                   try {
                     p.validate_one_sided();
                   } catch (const Error& e) {
                     fail(e.what());
                   }
                 },
             },
             policy);
}

double SequentialTest::Leg::log_value() const {
  if (frozen_log == kNegInf) return kNegInf;
  return frozen_log + (mixture ? mixture_value(*mixture) : fixed.log_m);
}

SequentialTest::SequentialTest(TestConfig cfg, StakePolicy policy, std::size_t node_count)
    : cfg_(std::move(cfg)), policy_(std::move(policy)), node_count_(node_count) {
  cfg_.validate();
  validate_policy(policy_, cfg_);
  const bool two = std::holds_alternative<TwoSided>(cfg_.side);
  if (two || std::holds_alternative<UpperNull>(cfg_.side)) plus_.emplace().side = Side::kUpper;
  if (two || std::holds_alternative<LowerNull>(cfg_.side)) minus_.emplace().side = Side::kLower;
  reset_legs();
}

void SequentialTest::reset_legs() {
  for (auto* leg : {plus_ ? &*plus_ : nullptr, minus_ ? &*minus_ : nullptr}) {
    if (!leg) continue;
    leg->fixed = MartingaleState{};
    leg->mixture.reset();
    if (const auto* spec = std::get_if<MixtureSpec>(&policy_)) {
      leg->mixture = mixture_init(leg->side == Side::kUpper ? *spec : spec->mirrored(), node_count_);
    }
  }
}

double SequentialTest::stake_for(const Leg& leg) const {
  return std::visit(Overloaded{
                        [](const ConstantStake& p) { return p.c; },
                        [&](const StakeSchedule& p) {
                          return p.stake_for_step(snapshot_.k + 1 - segment_start_);
                        },
                        [&](const PowerFamily& p) { return p.stake(cfg_.mu, cfg_); },
                        [&](const MixtureSpec&) {
                          const double c = effective_c(*leg.mixture);
                          return std::abs(c);
                        },
                    },
                    policy_);
}

double SequentialTest::next_stake() const {
  const Leg& leg = plus_ ? *plus_ : *minus_;
  if (leg.log_value() == kNegInf) return 0.0;
  return stake_for(leg);
}

void SequentialTest::advance(Leg& leg, double t, double stake) {
  if (leg.mixture) {
    mixture_absorb(*leg.mixture, t, cfg_);
  } else {
    leg.fixed = step(leg.fixed, t, stake, cfg_, leg.side);
  }
}

const TestSnapshot& SequentialTest::observe(double t) {
  const std::size_t index = snapshot_.k + 1;
  cfg_.check_observation(t, index);
  std::optional<double> shown;
  for (auto* leg : {plus_ ? &*plus_ : nullptr, minus_ ? &*minus_ : nullptr}) {
    if (!leg) continue;
    double stake = 0.0;
    if (leg->log_value() != kNegInf) stake = stake_for(*leg);
    if (!shown) shown = stake;
    advance(*leg, t, stake);
  }
  const double rho = cfg_.rho_plus();
  double log_m = 0.0;
  if (plus_ && minus_) {
    log_m = log_add_weighted(plus_->log_value(), rho, minus_->log_value(), 1.0 - rho);
  } else {
    log_m = plus_ ? plus_->log_value() : minus_->log_value();
  }
  snapshot_.k = index;
  snapshot_.log_m = log_m;
  snapshot_.log_m_max = std::max(snapshot_.log_m_max, log_m);
  snapshot_.absorbed = log_m == kNegInf;
  snapshot_.decision = decision(snapshot_.log_m_max, cfg_.alpha);
  snapshot_.stake = shown;
  return snapshot_;
}

void SequentialTest::switch_policy(StakePolicy policy) {
  validate_policy(policy, cfg_);
  for (auto* leg : {plus_ ? &*plus_ : nullptr, minus_ ? &*minus_ : nullptr}) {
    if (leg) leg->frozen_log = leg->log_value();
  }
  policy_ = std::move(policy);
  segment_start_ = snapshot_.k;
  reset_legs();
}

}  // namespace anytime
