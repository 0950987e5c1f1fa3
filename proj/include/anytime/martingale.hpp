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
#include <cstddef>
#include <limits>
#include <span>

#include "anytime/config.hpp"

namespace anytime {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Running state of one test martingale, kept in natural-log space.
// An absorbed martingale (a factor of exactly zero) sits at log_m = -inf for
// good; log_m_max keeps whatever maximum was reached before that.
struct MartingaleState {
  std::size_t k = 0;
  double log_m = 0.0;
  double log_m_max = 0.0;
  bool absorbed = false;

  bool operator==(const MartingaleState&) const = default;
};

enum class Decision { kContinue, kReject };

const char* to_string(Decision d);

// Side used by the single-sided nulls; throws for TwoSided, which needs both.
Side default_side(const TestConfig& cfg);

// z with factor = 1 - c * z; z <= 1 whenever t respects the bound of `side`.
double normalized_deviation(Side side, double t, const TestConfig& cfg);

// Betting factor 1 - c (t - mu)/(tau1 - mu) (upper) or 1 - c (mu - t)/(mu - tau0)
// (lower). Validates the stake and the observation.
double factor(Side side, double t, const TestConfig& cfg, double c);

void check_stake(double c, std::size_t index);

MartingaleState step(const MartingaleState& state, double t, double c, const TestConfig& cfg,
                     Side side);
inline MartingaleState step(const MartingaleState& state, double t, double c,
                            const TestConfig& cfg) {
  return step(state, t, c, cfg, default_side(cfg));
}

// One stake for the whole batch. The running maximum is only refreshed at the
// end of the batch, so crossings inside the batch are not credited.
MartingaleState batch_step(const MartingaleState& state, std::span<const double> ts, double c,
                           const TestConfig& cfg, Side side);
inline MartingaleState batch_step(const MartingaleState& state, std::span<const double> ts,
                                  double c, const TestConfig& cfg) {
  return batch_step(state, ts, c, cfg, default_side(cfg));
}

// log(rho+ M+ + rho- M-), both legs fed the same stream.
double two_sided_value(const MartingaleState& plus, const MartingaleState& minus,
                       double rho_plus);

// log(w_a e^a + w_b e^b) without overflow; zero weights drop their term.
double log_add_weighted(double a, double weight_a, double b, double weight_b);

// Reject iff the running maximum reached 1/alpha (ties reject).
Decision decision(double log_m_max, double alpha);

}  // namespace anytime
