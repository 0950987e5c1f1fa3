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

#include "anytime/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anytime/detail/overloaded.hpp"
#include "anytime/error.hpp"
#include "anytime/kernels.hpp"
#include "anytime/martingale.hpp"
#include "anytime/sequential.hpp"

namespace anytime {
namespace {

using detail::Overloaded;

void add_count(std::vector<double>& values, std::vector<double>& counts, double t) {
  const auto it = std::lower_bound(values.begin(), values.end(), t);
  const auto pos = it - values.begin();
  if (it != values.end() && *it == t) {
    counts[static_cast<std::size_t>(pos)] += 1.0;
  } else {
    values.insert(it, t);
    counts.insert(counts.begin() + pos, 1.0);
  }
}

double upper_z(double t, double mu, double tau1) { return (t - mu) / (tau1 - mu); }

double log_factor(double c, double z) {
  const double f = 1.0 - c * z;
  return f <= 0.0 ? kNegInf : std::log(f);
}

double require_tau1(const TestConfig& cfg) {
  if (!cfg.tau1) throw Error(ErrorCode::kInvalidConfig, "tau1: required for upper bounds");
  return *cfg.tau1;
}

// Stake of a mu-independent or power-family policy at mu; nullopt below the
// power family's range.
std::optional<double> fixed_stake(const StakePolicy& policy, double mu, const TestConfig& cfg) {
  if (const auto* c = std::get_if<ConstantStake>(&policy)) return c->c;
  if (const auto* p = std::get_if<PowerFamily>(&policy)) {
    if (mu < p->min_mu(cfg)) return std::nullopt;
    return p->stake(mu, cfg);
  }
  return 0.0;
}

void check_family_policy(const StakePolicy& policy, const TestConfig& cfg) {
  std::visit(Overloaded{
                 [](const ConstantStake& p) {
                   if (!(p.c >= 0.0 && p.c <= 1.0)) {
                     throw Error(ErrorCode::kInvalidPolicy, "constant stake must lie in [0,1]");
                   }
                 },
                 [&](const StakeSchedule& p) { validate_policy(p, cfg); },
                 [&](const PowerFamily& p) {
                   const auto grid = default_mu_grid(cfg);
                   const PolicyReport report = validate_c_policy(p, cfg, grid);
                   if (!report.ok) throw Error(ErrorCode::kInvalidPolicy, report.message);
                 },
                 [](const MixtureSpec& p) {
                   try {
                     p.validate_one_sided();
                   } catch (const Error& e) {
                     throw Error(ErrorCode::kInvalidPolicy, e.what());
                   }
                 },
             },
             policy);
}

}  // namespace

PolicyReport validate_c_policy(const StakePolicy& policy, const TestConfig& cfg,
                               std::span<const double> mu_grid) {
  PolicyReport report;
  auto violate = [&](double mu, const std::string& msg) {
    if (!report.ok) return;
    report.ok = false;
    report.first_violation_mu = mu;
    report.message = msg;
  };
  if (!cfg.tau0 || !cfg.tau1) {
    violate(0.0, "tau0,tau1: the policy check needs both bounds");
    return report;
  }
  const double tau0 = *cfg.tau0;
  const double tau1 = *cfg.tau1;
  if (const auto* mix = std::get_if<MixtureSpec>(&policy)) {
    try {
      mix->validate_one_sided();
    } catch (const Error& e) {
      violate(tau0, e.what());
    }
    return report;
  }
  if (const auto* sched = std::get_if<StakeSchedule>(&policy)) {
    try {
      validate_policy(*sched, cfg);
    } catch (const Error& e) {
      violate(tau0, e.what());
    }
    return report;
  }
  const auto* power = std::get_if<PowerFamily>(&policy);
  if (power) {
    if (!(power->m > 0.0 && power->m < tau1 - tau0)) {
      violate(tau0, "power family: m must lie in (0, tau1 - tau0)");
      return report;
    }
    if (!(power->r >= 0.0 && power->r <= 1.0 && power->s >= 0.0 && power->s <= 1.0)) {
      violate(tau0, "power family: r and s must lie in [0,1]");
      return report;
    }
    if (!(power->d >= 0.0)) {
      violate(tau0, "power family: d must be non-negative");
      return report;
    }
    const double mu_min = power->min_mu(cfg);
    const double c_at_min = power->stake(mu_min, cfg);
    if (c_at_min > 1.0) {
      violate(mu_min, "power family: stake " + std::to_string(c_at_min) + " exceeds 1 at mu = " +
                          std::to_string(mu_min) + " (d above its cap " +
                          std::to_string(power->d_cap(cfg)) + ")");
      return report;
    }
  }
  if (mu_grid.empty()) return report;
  const auto [lo_it, hi_it] = std::minmax_element(mu_grid.begin(), mu_grid.end());
  const double h = std::max(1e-6 * (*hi_it - *lo_it), 1e-12);
  auto stake_at = [&](double mu) { return fixed_stake(policy, mu, cfg); };
  for (double mu : mu_grid) {
    if (!(mu > tau0 && mu < tau1)) {
      violate(mu, "mu grid point outside (tau0, tau1)");
      return report;
    }
    const auto c = stake_at(mu);
    if (!c) continue;
    if (!(*c >= 0.0 && *c <= 1.0)) {
      violate(mu, "stake " + std::to_string(*c) + " outside [0,1] at mu = " + std::to_string(mu));
      return report;
    }
    const double a = std::max(mu - h, tau0 + 0.5 * (mu - tau0));
    const double b = std::min(mu + h, tau1 - 0.5 * (tau1 - mu));
    const auto ca = stake_at(a);
    const auto cb = stake_at(b);
    if (!ca || !cb || *ca <= 0.0 || *cb <= 0.0) continue;
    const double slope = -(std::log(*cb) - std::log(*ca)) / (b - a);
    const double band = 1.0 / (tau1 - mu) + 1.0 / (mu - tau0);
    const double slack = 1e-6 * band;
    if (slope < -slack || slope > band + slack) {
      violate(mu, "-d/dmu log c = " + std::to_string(slope) + " outside [0, " +
                      std::to_string(band) + "] at mu = " + std::to_string(mu));
      return report;
    }
  }
  return report;
}

std::vector<double> default_mu_grid(const TestConfig& cfg, std::size_t points) {
  const double tau0 = cfg.tau0.value_or(0.0);
  const double tau1 = cfg.tau1.value_or(1.0);
  std::vector<double> grid;
  grid.reserve(points);
  for (std::size_t i = 1; i <= points; ++i) {
    grid.push_back(tau0 + (tau1 - tau0) * static_cast<double>(i) / static_cast<double>(points + 1));
  }
  return grid;
}

// ---------------------------------------------------------------------------

double SuitableFamily::Segment::log_value(double mu, const TestConfig& cfg) const {
  const double tau1 = *cfg.tau1;
  if (fresh) {
    MixtureState state = *fresh;
    const TestConfig at = cfg.with_mu(mu);
    for (std::size_t i = 0; i < values.size(); ++i) mixture_absorb(state, values[i], at, counts[i]);
    return mixture_value(state);
  }
  if (const auto* sched = std::get_if<StakeSchedule>(&policy)) {
    double sum = 0.0;
    for (std::size_t j = 0; j < raw.size(); ++j) {
      sum += log_factor(sched->stake_for_step(j + 1), upper_z(raw[j], mu, tau1));
    }
    return sum;
  }
  const auto c = fixed_stake(policy, mu, cfg);
  if (!c) return kNegInf;
  if (values.empty()) return 0.0;
  std::vector<double> zs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) zs[i] = upper_z(values[i], mu, tau1);
  return kernels::active().dot_log_affine(counts.data(), zs.data(), zs.size(), *c);
}

SuitableFamily::SuitableFamily(TestConfig cfg, StakePolicy policy) : cfg_(std::move(cfg)) {
  cfg_.validate_bounds();
  require_tau1(cfg_);
  switch_policy(std::move(policy));
}

void SuitableFamily::observe(double t) {
  cfg_.check_observation(t, k_ + 1);
  Segment& seg = segments_.back();
  add_count(seg.values, seg.counts, t);
  if (std::holds_alternative<StakeSchedule>(seg.policy)) seg.raw.push_back(t);
  ++k_;
  sum_ += t;
}

void SuitableFamily::switch_policy(StakePolicy policy) {
  check_family_policy(policy, cfg_);
  Segment seg{std::move(policy), {}, {}, {}, std::nullopt};
  if (const auto* mix = std::get_if<MixtureSpec>(&seg.policy)) seg.fresh = mixture_init(*mix);
  segments_.push_back(std::move(seg));
}

double SuitableFamily::log_value(double mu) const {
  double sum = 0.0;
  for (const Segment& seg : segments_) {
    sum += seg.log_value(mu, cfg_);
    if (sum == kNegInf) break;
  }
  return sum;
}

double SuitableFamily::lowest_mu() const {
  double lowest = sample_mean();
  if (cfg_.tau0) lowest = std::max(lowest, *cfg_.tau0 + kEdgeGap);
  for (const Segment& seg : segments_) {
    if (const auto* p = std::get_if<PowerFamily>(&seg.policy)) {
      lowest = std::max(lowest, p->min_mu(cfg_));
    }
  }
  return lowest;
}

SuitableFamily::Cursor::Cursor(const SuitableFamily& family, double mu)
    : cfg_(family.cfg_.with_mu(mu)), mu_(mu), policy_(family.segments_.back().policy) {
  for (std::size_t i = 0; i + 1 < family.segments_.size(); ++i) {
    frozen_ += family.segments_[i].log_value(mu, family.cfg_);
  }
  const Segment& last = family.segments_.back();
  start_segment(last.policy);
  if (mixture_) {
    for (std::size_t i = 0; i < last.values.size(); ++i) {
      mixture_absorb(*mixture_, last.values[i], cfg_, last.counts[i]);
    }
  } else {
    current_ = last.log_value(mu, family.cfg_);
    step_ = last.raw.size();
  }
}

void SuitableFamily::Cursor::start_segment(const StakePolicy& policy) {
  policy_ = policy;
  current_ = 0.0;
  step_ = 0;
  mixture_.reset();
  if (const auto* mix = std::get_if<MixtureSpec>(&policy_)) {
    mixture_ = mixture_init(*mix);
  } else if (const auto c = fixed_stake(policy_, mu_, cfg_)) {
    stake_ = *c;
  } else {
    current_ = kNegInf;
  }
}

void SuitableFamily::Cursor::observe(double t) {
  if (mixture_) {
    mixture_absorb(*mixture_, t, cfg_);
    return;
  }
  ++step_;
  if (current_ == kNegInf) return;
  double c = stake_;
  if (const auto* sched = std::get_if<StakeSchedule>(&policy_)) c = sched->stake_for_step(step_);
  current_ += log_factor(c, upper_z(t, mu_, *cfg_.tau1));
}

void SuitableFamily::Cursor::switch_policy(const StakePolicy& policy) {
  frozen_ = log_value();
  start_segment(policy);
}

double SuitableFamily::Cursor::log_value() const {
  if (frozen_ == kNegInf) return kNegInf;
  return frozen_ + (mixture_ ? mixture_value(*mixture_) : current_);
}

// ---------------------------------------------------------------------------

double at_k_upper_bound(const SuitableFamily& family) {
  if (family.k() == 0) return kInf;
  const TestConfig& cfg = family.config();
  const double log_threshold = cfg.log_threshold();
  double hi = *cfg.tau1 - kEdgeGap;
  if (family.log_value(hi) < log_threshold) return kInf;
  double lo = family.lowest_mu();
  if (lo >= hi) return hi;
  if (family.log_value(lo) >= log_threshold) return lo;
  while (hi - lo > kBoundTolerance) {
    const double mid = 0.5 * (lo + hi);
    (family.log_value(mid) >= log_threshold ? hi : lo) = mid;
  }
  return hi;
}

RunningUpperBound::RunningUpperBound(TestConfig cfg, StakePolicy policy, bool track_at_k)
    : family_(std::move(cfg), std::move(policy)), track_at_k_(track_at_k) {
  result_.mu_r = kInf;
  result_.running_min = kInf;
  rebuild_probe();
}

void RunningUpperBound::rebuild_probe() {
  const double top = *family_.config().tau1 - kEdgeGap;
  const double mu = std::min(top, result_.running_min - kBoundTolerance);
  probe_.emplace(family_, mu);
}

const BoundResult& RunningUpperBound::observe(double t) {
  family_.observe(t);
  probe_->observe(t);
  result_.k = family_.k();
  if (track_at_k_) {
    result_.mu_r = at_k_upper_bound(family_);
    if (result_.mu_r < result_.running_min) {
      result_.running_min = result_.mu_r;
      rebuild_probe();
    }
    return result_;
  }
  result_.mu_r = kInf;
  if (probe_->log_value() >= family_.config().log_threshold()) {
    result_.mu_r = at_k_upper_bound(family_);
    if (result_.mu_r < result_.running_min) result_.running_min = result_.mu_r;
    rebuild_probe();
  }
  return result_;
}

void RunningUpperBound::switch_policy(StakePolicy policy) {
  family_.switch_policy(policy);
  probe_->switch_policy(policy);
}

BoundResult upper_bound(std::span<const double> history, const TestConfig& cfg,
                        const StakePolicy& policy, BoundMode mode) {
  if (mode == BoundMode::kRunning) {
    RunningUpperBound running(cfg, policy, true);
    for (double t : history) running.observe(t);
    return running.result();
  }
  SuitableFamily family(cfg, policy);
  for (double t : history) family.observe(t);
  const double mu_r = at_k_upper_bound(family);
  return BoundResult{family.k(), mu_r, mu_r};
}

std::vector<BoundResult> bound_trajectory(std::span<const double> history, const TestConfig& cfg,
                                          const StakePolicy& policy) {
  RunningUpperBound running(cfg, policy, true);
  std::vector<BoundResult> out;
  out.reserve(history.size());
  for (double t : history) out.push_back(running.observe(t));
  return out;
}

// ---------------------------------------------------------------------------

IntervalFamily::IntervalFamily(TestConfig cfg, MixtureSpec spec, std::size_t node_count)
    : cfg_(std::move(cfg)) {
  cfg_.validate_bounds();
  if (!cfg_.tau0 || !cfg_.tau1) {
    throw Error(ErrorCode::kInvalidConfig, "tau0,tau1: intervals need both bounds");
  }
  spec.validate();
  if (!spec.two_sided()) {
    throw Error(ErrorCode::kInvalidMixture, "interval mixture needs stakes on both sides of 0");
  }
  fresh_ = mixture_init(spec, node_count);
}

void IntervalFamily::observe(double t) {
  cfg_.check_observation(t, k_ + 1);
  add_count(values_, counts_, t);
  ++k_;
  sum_ += t;
}

MixtureState IntervalFamily::state_at(double mu) const {
  MixtureState state = fresh_;
  const TestConfig at = cfg_.with_mu(mu);
  for (std::size_t i = 0; i < values_.size(); ++i) mixture_absorb(state, values_[i], at, counts_[i]);
  return state;
}

double IntervalFamily::log_value(double mu) const { return mixture_value(state_at(mu)); }

IntervalBracket at_k_interval(const IntervalFamily& family) {
  const TestConfig& cfg = family.config();
  const double tau0 = *cfg.tau0;
  const double tau1 = *cfg.tau1;
  const double a = tau0 + kEdgeGap;
  const double b = tau1 - kEdgeGap;
  IntervalBracket out{{a, b}, {tau0, tau1}};
  if (family.k() == 0) return out;
  const double log_threshold = cfg.log_threshold();
  const double m = std::clamp(family.sample_mean(), a, b);
  if (family.log_value(m) >= log_threshold) {
    out.inner = out.outer = Interval{m, m};
    return out;
  }
  if (family.log_value(a) >= log_threshold) {
    double in = m;
    double outside = a;
    while (in - outside > kBoundTolerance) {
      const double mid = 0.5 * (in + outside);
      (family.log_value(mid) >= log_threshold ? outside : in) = mid;
    }
    out.inner.lo = in;
    out.outer.lo = outside;
  }
  if (family.log_value(b) >= log_threshold) {
    double in = m;
    double outside = b;
    while (outside - in > kBoundTolerance) {
      const double mid = 0.5 * (in + outside);
      (family.log_value(mid) >= log_threshold ? outside : in) = mid;
    }
    out.inner.hi = in;
    out.outer.hi = outside;
  }
  return out;
}

RunningInterval::RunningInterval(TestConfig cfg, MixtureSpec spec, bool track_at_k,
                                 std::size_t node_count)
    : family_(std::move(cfg), std::move(spec), node_count), track_at_k_(track_at_k) {
  const IntervalBracket whole = at_k_interval(family_);
  inner_ = whole.inner;
  result_.at_k = whole.outer;
  result_.running = whole.outer;
  result_.last_nonempty = whole.outer;
  rebuild_probes();
}

void RunningInterval::rebuild_probes() {
  probe_lo_.reset();
  probe_hi_.reset();
  if (!result_.running || inner_.lo > inner_.hi) return;
  probe_lo_ = family_.state_at(inner_.lo);
  probe_hi_ = family_.state_at(inner_.hi);
}

const IntervalResult& RunningInterval::observe(double t) {
  family_.observe(t);
  result_.k = family_.k();
  const TestConfig& cfg = family_.config();
  const double log_threshold = cfg.log_threshold();
  bool recompute = track_at_k_;
  if (probe_lo_) {
    mixture_absorb(*probe_lo_, t, cfg.with_mu(inner_.lo));
    mixture_absorb(*probe_hi_, t, cfg.with_mu(inner_.hi));
    recompute = recompute || mixture_value(*probe_lo_) >= log_threshold ||
                mixture_value(*probe_hi_) >= log_threshold;
  } else if (result_.running) {
    recompute = true;
  }
  if (!recompute) return result_;

  const IntervalBracket now = at_k_interval(family_);
  result_.at_k = now.outer;
  if (!result_.running) return result_;
  const Interval before = *result_.running;
  const Interval outer{std::max(before.lo, now.outer.lo), std::min(before.hi, now.outer.hi)};
  const Interval inner{std::max(inner_.lo, now.inner.lo), std::min(inner_.hi, now.inner.hi)};
  if (outer.lo > outer.hi) {
    result_.running.reset();
    inner_ = inner;
    rebuild_probes();
    return result_;
  }
  result_.running = outer;
  result_.last_nonempty = outer;
  if (!(inner == inner_)) {
    inner_ = inner;
    rebuild_probes();
  }
  return result_;
}

IntervalResult interval(std::span<const double> history, const TestConfig& cfg,
                        const MixtureSpec& spec, BoundMode mode) {
  if (mode == BoundMode::kRunning) {
    RunningInterval running(cfg, spec, true);
    for (double t : history) running.observe(t);
    return running.result();
  }
  IntervalFamily family(cfg, spec);
  for (double t : history) family.observe(t);
  const IntervalBracket now = at_k_interval(family);
  return IntervalResult{family.k(), now.outer, now.outer, now.outer};
}

std::vector<IntervalResult> interval_trajectory(std::span<const double> history,
                                                const TestConfig& cfg, const MixtureSpec& spec) {
  RunningInterval running(cfg, spec, true);
  std::vector<IntervalResult> out;
  out.reserve(history.size());
  for (double t : history) out.push_back(running.observe(t));
  return out;
}

}  // namespace anytime
