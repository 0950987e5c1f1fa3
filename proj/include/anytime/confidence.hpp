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
#include <span>
#include <string>
#include <vector>

#include "anytime/config.hpp"
#include "anytime/mixture.hpp"
#include "anytime/policy.hpp"

// Confidence upper bounds from families {M_k^mu} that increase in mu, and
// two-sided intervals from a convex mixture over stakes in [lo, hi], lo < 0 < hi.
// Lower bounds come from reflecting the data (t -> -t) and the bounds.

namespace anytime {

inline constexpr double kBoundTolerance = 1e-8;
inline constexpr double kEdgeGap = 1e-9;

struct PolicyReport {
  bool ok = true;
  std::optional<double> first_violation_mu;
  std::string message;
};

// Checks that the stake c(mu) stays in [0, 1] and that its log-derivative lies
// in [-1/(tau1 - mu) - 1/(mu - tau0), 0] on the grid. Violations are data.
PolicyReport validate_c_policy(const StakePolicy& policy, const TestConfig& cfg,
                               std::span<const double> mu_grid);

// Evenly spaced interior grid of (tau0, tau1).
std::vector<double> default_mu_grid(const TestConfig& cfg, std::size_t points = 199);

// Observed stream plus the policy segments driving M_k^mu for every mu.
// Policy switches compose multiplicatively: log M^mu sums over segments.
class SuitableFamily {
 public:
  SuitableFamily(TestConfig cfg, StakePolicy policy);

  void observe(double t);
  void switch_policy(StakePolicy policy);

  // log M_k^mu on the upper side; -inf below a power family's range.
  double log_value(double mu) const;

  std::size_t k() const { return k_; }
  double sample_mean() const { return k_ == 0 ? 0.0 : sum_ / static_cast<double>(k_); }
  double lowest_mu() const;
  const TestConfig& config() const { return cfg_; }

  // Incremental evaluation at one fixed mu.
  class Cursor {
   public:
    Cursor(const SuitableFamily& family, double mu);
    void observe(double t);
    void switch_policy(const StakePolicy& policy);
    double log_value() const;
    double mu() const { return mu_; }

   private:
    TestConfig cfg_;
    double mu_;
    double frozen_ = 0.0;
    double current_ = 0.0;
    double stake_ = 0.0;
    std::size_t step_ = 0;
    StakePolicy policy_;
    std::optional<MixtureState> mixture_;
    void start_segment(const StakePolicy& policy);
  };

 private:
  struct Segment {
    StakePolicy policy;
    std::vector<double> values;  // distinct, ascending
    std::vector<double> counts;
    std::vector<double> raw;     // schedules only, in arrival order
    std::optional<MixtureState> fresh;
    double log_value(double mu, const TestConfig& cfg) const;
  };

  TestConfig cfg_;
  std::vector<Segment> segments_;
  std::size_t k_ = 0;
  double sum_ = 0.0;
};

enum class BoundMode { kAtK, kRunning };

struct BoundResult {
  std::size_t k = 0;
  double mu_r = 0.0;          // +inf when no admissible mu has reached 1/alpha
  double running_min = 0.0;   // +inf likewise

  bool operator==(const BoundResult&) const = default;
};

// inf{mu : M_k^mu >= 1/alpha} by bisection, reported as the upper bracket end.
double at_k_upper_bound(const SuitableFamily& family);

// Running minimum of the at-k bound. With track_at_k every step bisects and the
// minimum is exact. Otherwise each step only checks M_k just below the current
// minimum (by the bisection tolerance) and bisects when that reaches 1/alpha;
// mu_r is then +inf on steps without a bisection.
class RunningUpperBound {
 public:
  RunningUpperBound(TestConfig cfg, StakePolicy policy, bool track_at_k = false);

  const BoundResult& observe(double t);
  void switch_policy(StakePolicy policy);

  const BoundResult& result() const { return result_; }
  const SuitableFamily& family() const { return family_; }

 private:
  void rebuild_probe();

  SuitableFamily family_;
  bool track_at_k_;
  std::optional<SuitableFamily::Cursor> probe_;
  BoundResult result_;
};

BoundResult upper_bound(std::span<const double> history, const TestConfig& cfg,
                        const StakePolicy& policy, BoundMode mode);

// One entry per k = 1..n with both the at-k bound and the running minimum.
std::vector<BoundResult> bound_trajectory(std::span<const double> history, const TestConfig& cfg,
                                          const StakePolicy& policy);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Interval&) const = default;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

struct IntervalResult {
  std::size_t k = 0;
  Interval at_k;
  std::optional<Interval> running;  // nullopt: EMPTY
  Interval last_nonempty;

  bool operator==(const IntervalResult&) const = default;
};

// Two-sided mixture martingale over mu; convex in mu.
class IntervalFamily {
 public:
  IntervalFamily(TestConfig cfg, MixtureSpec spec, std::size_t node_count = kDefaultMixtureNodes);

  void observe(double t);
  double log_value(double mu) const;
  MixtureState state_at(double mu) const;

  std::size_t k() const { return k_; }
  double sample_mean() const { return k_ == 0 ? 0.0 : sum_ / static_cast<double>(k_); }
  const TestConfig& config() const { return cfg_; }
  const MixtureState& fresh() const { return fresh_; }

 private:
  TestConfig cfg_;
  MixtureState fresh_;
  std::vector<double> values_;
  std::vector<double> counts_;
  std::size_t k_ = 0;
  double sum_ = 0.0;
};

// Endpoints of {mu : M_k^mu(pi) < 1/alpha}. `inner` ends lie inside the set,
// `outer` ends outside (or at tau0/tau1 when the edge never crosses).
struct IntervalBracket {
  Interval inner;
  Interval outer;
};
IntervalBracket at_k_interval(const IntervalFamily& family);

// Running intersection of the at-k intervals. With track_at_k every step
// recomputes at_k. Otherwise each step checks M_k only at the two inner ends of
// the running interval and recomputes when either reaches 1/alpha; at_k then
// holds the most recent recomputation.
class RunningInterval {
 public:
  RunningInterval(TestConfig cfg, MixtureSpec spec, bool track_at_k = false,
                  std::size_t node_count = kDefaultMixtureNodes);

  const IntervalResult& observe(double t);
  const IntervalResult& result() const { return result_; }
  const IntervalFamily& family() const { return family_; }

 private:
  void rebuild_probes();

  IntervalFamily family_;
  bool track_at_k_;
  Interval inner_;
  std::optional<MixtureState> probe_lo_;
  std::optional<MixtureState> probe_hi_;
  IntervalResult result_;
};

IntervalResult interval(std::span<const double> history, const TestConfig& cfg,
                        const MixtureSpec& spec, BoundMode mode);

std::vector<IntervalResult> interval_trajectory(std::span<const double> history,
                                                const TestConfig& cfg, const MixtureSpec& spec);

}  // namespace anytime
