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
#include <vector>

#include "anytime/config.hpp"
#include "anytime/distribution.hpp"
#include "anytime/policy.hpp"

// Growth analysis of the fixed-stake martingale M_k(c) for H0: E(T) >= mu
// (upper side, factor 1 - c (T - mu)/(tau1 - mu)) under a known law of T.

namespace anytime {

// lambda(c) = E log(1 - c (T - mu)/(tau1 - mu)), the expected log growth per
// observation. Returns -inf when a factor of zero has positive probability.
double lambda_fn(const DistributionSpec& dist, const TestConfig& cfg, double c);

// lambda'(c) = E[-Z/(1 - cZ)], Z = (T - mu)/(tau1 - mu).
double lambda_derivative(const DistributionSpec& dist, const TestConfig& cfg, double c);

struct LogFactorMoments {
  double mean = 0.0;      // lambda(c)
  double variance = 0.0;  // Var log(1 - cZ)
};
LogFactorMoments log_factor_moments(const DistributionSpec& dist, const TestConfig& cfg, double c);

struct GrowthCurve {
  std::vector<double> c_grid;
  std::vector<double> lambda_vals;
};
GrowthCurve growth_curve(const DistributionSpec& dist, const TestConfig& cfg,
                         std::vector<double> c_grid);

// Positive root of lambda on (0, 1), or 1 when lambda stays positive.
// Throws Error(kNoPositiveGrowth) unless E(T) < mu.
double c_max(const DistributionSpec& dist, const TestConfig& cfg);

struct OptimalStake {
  double c = 0.0;
  double lambda_at = 0.0;
};
// Maximizer of the concave lambda on [0, 1]. Never below (mu - nu)/(mu - tau0)
// when tau0 is configured.
OptimalStake c_opt(const DistributionSpec& dist, const TestConfig& cfg);

// D_KL(Alt(a) || Alt(b)).
double kl_alt(double a, double b);

struct SizeBounds {
  double lower = 0.0;   // alpha / (1 - c (tau0 - mu)/(tau1 - mu))
  double upper = 0.0;   // alpha
  double coarse = 0.0;  // alpha (tau1 - mu)/(tau1 - tau0)
};
SizeBounds size_bounds(const TestConfig& cfg, double c);

struct WaldApproximation {
  double mean_n = 0.0;
  double sd_n = 0.0;
};
// Throws Error(kInfiniteExpectedSample) when lambda(c) <= 0.
WaldApproximation wald_n(const DistributionSpec& dist, const TestConfig& cfg, double c);

// First rejection step for the constant stream t, t, t, ... Throws
// Error(kNeverRejects) when the stream cannot raise the martingale.
std::size_t deterministic_n(double t, const TestConfig& cfg, const StakePolicy& policy);

struct StopDistribution {
  std::vector<double> pmf;  // pmf[n-1] = P{N = n}, n <= n_max
  double mass_stopped = 0.0;
  double mass_not_stopped = 0.0;
  // Conditional on stopping by n_max.
  double mean = 0.0;
  double sd = 0.0;
  // Smallest n with P{N <= n} >= q; nullopt when not reached by n_max.
  std::optional<std::size_t> q50;
  std::optional<std::size_t> q75;
  std::optional<std::size_t> q90;
};

// Exact law of the first time M_k(c) >= 1/alpha for finite-support T with at
// most four support points, by forward propagation over support counts.
// Throws Error(kStateSpaceTooLarge) beyond that.
StopDistribution exact_stop_dist(const DistributionSpec& dist, const TestConfig& cfg, double c,
                                 std::size_t n_max);

// (1 - c) mu + c tau0: M_k(c) <= alpha signals E(T) above this value.
double inverse_signal_threshold(const TestConfig& cfg, double c);

}  // namespace anytime
