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

#include "anytime/martingale.hpp"

#include <algorithm>
#include <string>

#include "anytime/error.hpp"

namespace anytime {

const char* to_string(Decision d) { return d == Decision::kReject ? "Reject" : "Continue"; }

Side default_side(const TestConfig& cfg) {
  if (std::holds_alternative<UpperNull>(cfg.side)) return Side::kUpper;
  if (std::holds_alternative<LowerNull>(cfg.side)) return Side::kLower;
  throw Error(ErrorCode::kInvalidConfig,
              "two-sided configuration has no single factor side; pass one explicitly");
}

double normalized_deviation(Side side, double t, const TestConfig& cfg) {
  if (side == Side::kUpper) {
    if (!cfg.tau1) throw Error(ErrorCode::kInvalidConfig, "tau1: required for the upper side");
    return (t - cfg.mu) / (*cfg.tau1 - cfg.mu);
  }
  if (!cfg.tau0) throw Error(ErrorCode::kInvalidConfig, "tau0: required for the lower side");
  return (cfg.mu - t) / (cfg.mu - *cfg.tau0);
}

void check_stake(double c, std::size_t index) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw Error(ErrorCode::kInvalidStake,
                "stake " + std::to_string(c) + " at step " + std::to_string(index) +
                    " outside [0,1]",
                index);
  }
}

double factor(Side side, double t, const TestConfig& cfg, double c) {
  check_stake(c, 0);
  cfg.check_observation(t, 0);
  return 1.0 - c * normalized_deviation(side, t, cfg);
}

namespace {

MartingaleState advance(MartingaleState s, double t, double c, const TestConfig& cfg, Side side) {
  const std::size_t index = s.k + 1;
  check_stake(c, index);
  cfg.check_observation(t, index);
  const double z = normalized_deviation(side, t, cfg);
  s.k = index;
  if (s.absorbed) return s;
  const double f = 1.0 - c * z;
  if (f <= 0.0) {
    s.absorbed = true;
    s.log_m = kNegInf;
  } else {
    s.log_m += std::log(f);
  }
  return s;
}

}  // namespace

MartingaleState step(const MartingaleState& state, double t, double c, const TestConfig& cfg,
                     Side side) {
  MartingaleState next = advance(state, t, c, cfg, side);
  next.log_m_max = std::max(next.log_m_max, next.log_m);
  return next;
}

MartingaleState batch_step(const MartingaleState& state, std::span<const double> ts, double c,
                           const TestConfig& cfg, Side side) {
  MartingaleState next = state;
  for (double t : ts) next = advance(next, t, c, cfg, side);
  next.log_m_max = std::max(next.log_m_max, next.log_m);
  return next;
}

double log_add_weighted(double a, double weight_a, double b, double weight_b) {
  const double la = weight_a > 0.0 ? a + std::log(weight_a) : kNegInf;
  const double lb = weight_b > 0.0 ? b + std::log(weight_b) : kNegInf;
  const double hi = std::max(la, lb);
  if (hi == kNegInf) return kNegInf;
  const double lo = std::min(la, lb);
  return hi + std::log1p(std::exp(lo - hi));
}

double two_sided_value(const MartingaleState& plus, const MartingaleState& minus,
                       double rho_plus) {
  if (plus.k != minus.k) {
    throw Error(ErrorCode::kStreamDesync,
                "two-sided legs out of step: k+=" + std::to_string(plus.k) +
                    " k-=" + std::to_string(minus.k));
  }
  if (rho_plus == 1.0) return plus.log_m;
  if (rho_plus == 0.0) return minus.log_m;
  return log_add_weighted(plus.log_m, rho_plus, minus.log_m, 1.0 - rho_plus);
}

Decision decision(double log_m_max, double alpha) {
  return log_m_max >= std::log(1.0 / alpha) ? Decision::kReject : Decision::kContinue;
}

}  // namespace anytime
