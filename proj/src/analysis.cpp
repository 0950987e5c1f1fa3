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

#include "anytime/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "anytime/error.hpp"
#include "anytime/martingale.hpp"
#include "anytime/sequential.hpp"

namespace anytime {
namespace {

double require_tau1(const TestConfig& cfg) {
  if (!cfg.tau1) throw Error(ErrorCode::kInvalidConfig, "tau1: required for growth analysis");
  if (!(cfg.mu < *cfg.tau1)) throw Error(ErrorCode::kInvalidConfig, "mu: must be < tau1");
  return *cfg.tau1;
}

// E f(T) for T ~ Beta(a, b) on [0, 1]; f receives (t, 1 - t, log(1 - t)).
// Split at 1/2 and substitute u = t^a (left) and v = (1 - t)^b (right), which
// turns both density singularities into bounded integrands.
template <class F>
double beta_expectation(const BetaDist& d, F&& f) {
  static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  constexpr double kTolerance = 1e-12;
  const double a = d.a;
  const double b = d.b;
  const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  auto left = [&](double u) {
    const double t = std::pow(u, 1.0 / a);
    return f(t, 1.0 - t, std::log1p(-t)) * std::pow(1.0 - t, b - 1.0);
  };
  auto right = [&](double v) {
    const double omt = std::pow(v, 1.0 / b);
    const double t = 1.0 - omt;
    return f(t, omt, std::log(v) / b) * std::pow(t, a - 1.0);
  };
  const double lhs = integrator.integrate(left, 0.0, std::pow(0.5, a), kTolerance);
  const double rhs = integrator.integrate(right, 0.0, std::pow(0.5, b), kTolerance);
  return (lhs / a + rhs / b) * std::exp(-log_beta);
}

// log(1 - c (t - mu)/(tau1 - mu)) written as log((1-c) + c (tau1 - t)/(tau1 - mu))
// so the factor stays accurate next to t = tau1.
double beta_log_factor(double omt, double log_omt, double c, double mu, double tau1) {
  if (c == 1.0 && tau1 == 1.0) return log_omt - std::log(tau1 - mu);
  return std::log((1.0 - c) + c * ((tau1 - 1.0) + omt) / (tau1 - mu));
}

struct Discrete {
  std::vector<double> z;
  std::vector<double> p;
};

Discrete discretize(const FiniteSupport& fs, double mu, double tau1) {
  Discrete out;
  for (std::size_t i = 0; i < fs.points.size(); ++i) {
    out.z.push_back((fs.points[i] - mu) / (tau1 - mu));
    out.p.push_back(fs.probs[i]);
  }
  return out;
}

}  // namespace

double lambda_fn(const DistributionSpec& dist, const TestConfig& cfg, double c) {
  const double tau1 = require_tau1(cfg);
  if (const auto fs = as_finite(dist)) {
    const Discrete d = discretize(*fs, cfg.mu, tau1);
    double sum = 0.0;
    for (std::size_t i = 0; i < d.z.size(); ++i) {
      const double f = 1.0 - c * d.z[i];
      if (f <= 0.0) return kNegInf;
      sum += d.p[i] * std::log1p(-c * d.z[i]);
    }
    return sum;
  }
  const auto& beta = std::get<BetaDist>(dist);
  return beta_expectation(beta, [&](double, double omt, double log_omt) {
    return beta_log_factor(omt, log_omt, c, cfg.mu, tau1);
  });
}

double lambda_derivative(const DistributionSpec& dist, const TestConfig& cfg, double c) {
  const double tau1 = require_tau1(cfg);
  if (const auto fs = as_finite(dist)) {
    const Discrete d = discretize(*fs, cfg.mu, tau1);
    double sum = 0.0;
    for (std::size_t i = 0; i < d.z.size(); ++i) {
      const double f = 1.0 - c * d.z[i];
      if (f <= 0.0) return kNegInf;
      sum -= d.p[i] * d.z[i] / f;
    }
    return sum;
  }
  const auto& beta = std::get<BetaDist>(dist);
  return beta_expectation(beta, [&](double t, double omt, double) {
    const double z = (t - cfg.mu) / (tau1 - cfg.mu);
    const double f = (1.0 - c) + c * ((tau1 - 1.0) + omt) / (tau1 - cfg.mu);
    return -z / f;
  });
}

LogFactorMoments log_factor_moments(const DistributionSpec& dist, const TestConfig& cfg,
                                    double c) {
  const double tau1 = require_tau1(cfg);
  LogFactorMoments out;
  out.mean = lambda_fn(dist, cfg, c);
  if (out.mean == kNegInf) {
    out.variance = kInf;
    return out;
  }
  double second = 0.0;
  if (const auto fs = as_finite(dist)) {
    const Discrete d = discretize(*fs, cfg.mu, tau1);
    for (std::size_t i = 0; i < d.z.size(); ++i) {
      const double g = std::log1p(-c * d.z[i]);
      second += d.p[i] * g * g;
    }
  } else {
    second = beta_expectation(std::get<BetaDist>(dist), [&](double, double omt, double log_omt) {
      const double g = beta_log_factor(omt, log_omt, c, cfg.mu, tau1);
      return g * g;
    });
  }
  out.variance = std::max(0.0, second - out.mean * out.mean);
  return out;
}

GrowthCurve growth_curve(const DistributionSpec& dist, const TestConfig& cfg,
                         std::vector<double> c_grid) {
  GrowthCurve out;
  out.lambda_vals.reserve(c_grid.size());
  for (double c : c_grid) out.lambda_vals.push_back(lambda_fn(dist, cfg, c));
  out.c_grid = std::move(c_grid);
  return out;
}

double c_max(const DistributionSpec& dist, const TestConfig& cfg) {
  require_tau1(cfg);
  if (!(mean(dist) < cfg.mu)) {
    throw Error(ErrorCode::kNoPositiveGrowth,
                "E(T) >= mu: lambda(c) <= 0 for every stake, no positive growth");
  }
  double lo = 1e-12;
  double hi = 1.0 - 1e-12;
  if (lambda_fn(dist, cfg, hi) > 0.0) return 1.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (lambda_fn(dist, cfg, mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Concave lambda: bisect on the sign of lambda'. (Golden section on lambda
// itself stalls near sqrt(machine eps) because the maximum is flat.)
OptimalStake c_opt(const DistributionSpec& dist, const TestConfig& cfg) {
  require_tau1(cfg);
  const double nu = mean(dist);
  if (!(nu < cfg.mu)) {
    throw Error(ErrorCode::kNoPositiveGrowth, "E(T) >= mu: lambda has its maximum at c = 0");
  }
  double floor = 0.0;
  if (cfg.tau0) floor = std::clamp((cfg.mu - nu) / (cfg.mu - *cfg.tau0), 0.0, 1.0);

  double c = 1.0;
  double lo = 0.0;
  double hi = 1.0 - 1e-12;
  if (lambda_derivative(dist, cfg, hi) < 0.0) {
    for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
      const double mid = 0.5 * (lo + hi);
      (lambda_derivative(dist, cfg, mid) > 0.0 ? lo : hi) = mid;
    }
    c = 0.5 * (lo + hi);
  }
  c = std::max(c, floor);
  return OptimalStake{c, lambda_fn(dist, cfg, c)};
}

double kl_alt(double a, double b) {
  auto term = [](double p, double q) { return p == 0.0 ? 0.0 : p * std::log(p / q); };
  return term(a, b) + term(1.0 - a, 1.0 - b);
}

SizeBounds size_bounds(const TestConfig& cfg, double c) {
  if (!cfg.tau0 || !cfg.tau1) {
    throw Error(ErrorCode::kInvalidConfig, "tau0,tau1: size bounds need both support bounds");
  }
  const double tau0 = *cfg.tau0;
  const double tau1 = *cfg.tau1;
  SizeBounds out;
  out.upper = cfg.alpha;
  out.lower = cfg.alpha / (1.0 - c * (tau0 - cfg.mu) / (tau1 - cfg.mu));
  out.coarse = cfg.alpha * (tau1 - cfg.mu) / (tau1 - tau0);
  return out;
}

WaldApproximation wald_n(const DistributionSpec& dist, const TestConfig& cfg, double c) {
  const LogFactorMoments mom = log_factor_moments(dist, cfg, c);
  if (!(mom.mean > 0.0)) {
    throw Error(ErrorCode::kInfiniteExpectedSample,
                "lambda(c) <= 0: the expected sample number is infinite");
  }
  const double log_threshold = cfg.log_threshold();
  return WaldApproximation{log_threshold / mom.mean,
                           std::sqrt(mom.variance * log_threshold / std::pow(mom.mean, 3))};
}

std::size_t deterministic_n(double t, const TestConfig& cfg, const StakePolicy& policy) {
  constexpr std::size_t kMaxSteps = 50'000'000;
  SequentialTest test(cfg, policy);
  const TestSnapshot* snap = &test.observe(t);
  if (snap->decision == Decision::kReject) return 1;
  if (!(snap->log_m > 0.0)) {
    throw Error(ErrorCode::kNeverRejects,
                "the constant stream does not raise the martingale; it never rejects");
  }
  while (snap->k < kMaxSteps) {
    snap = &test.observe(t);
    if (snap->decision == Decision::kReject) return snap->k;
  }
  throw Error(ErrorCode::kNeverRejects, "no rejection within the step cap");
}

namespace {

void finish_summary(StopDistribution& out) {
  double total = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < out.pmf.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    const double p = out.pmf[i];
    total += p;
    s1 += p * n;
    s2 += p * n * n;
    cumulative += p;
    if (!out.q50 && cumulative >= 0.50) out.q50 = i + 1;
    if (!out.q75 && cumulative >= 0.75) out.q75 = i + 1;
    if (!out.q90 && cumulative >= 0.90) out.q90 = i + 1;
  }
  out.mass_stopped = total;
  if (total > 0.0) {
    out.mean = s1 / total;
    out.sd = std::sqrt(std::max(0.0, s2 / total - out.mean * out.mean));
  }
}

// Log value after `count` factors of `ell`; zero counts contribute nothing even
// when ell = -inf.
inline double scaled_log(std::size_t count, double ell) {
  return count == 0 ? 0.0 : static_cast<double>(count) * ell;
}

constexpr double kNegligibleMass = 1e-300;

StopDistribution two_point_dp(const std::array<double, 2>& ell, const std::array<double, 2>& prob,
                              double log_threshold, std::size_t n_max) {
  StopDistribution out;
  out.pmf.assign(n_max, 0.0);
  // mass[i] = P{alive, r = lo + i} where r counts the second support point.
  std::vector<double> mass{1.0};
  std::vector<double> next;
  std::size_t lo = 0;
  double dropped = 0.0;
  for (std::size_t k = 1; k <= n_max; ++k) {
    next.assign(mass.size() + 1, 0.0);
    for (std::size_t i = 0; i < mass.size(); ++i) {
      next[i] += mass[i] * prob[0];
      next[i + 1] += mass[i] * prob[1];
    }
    double stopped = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (next[i] == 0.0) continue;
      const std::size_t r = lo + i;
      const double log_m = scaled_log(k - r, ell[0]) + scaled_log(r, ell[1]);
      if (log_m >= log_threshold) {
        stopped += next[i];
        next[i] = 0.0;
      }
    }
    out.pmf[k - 1] = stopped;
    std::size_t first = 0;
    while (first < next.size() && next[first] < kNegligibleMass) dropped += next[first++];
    std::size_t last = next.size();
    while (last > first && next[last - 1] < kNegligibleMass) dropped += next[--last];
    mass.assign(next.begin() + static_cast<std::ptrdiff_t>(first),
                next.begin() + static_cast<std::ptrdiff_t>(last));
    lo += first;
    if (mass.empty()) break;
  }
  double alive = dropped;
  for (double m : mass) alive += m;
  finish_summary(out);
  out.mass_not_stopped = alive;
  return out;
}

StopDistribution multi_point_dp(const std::vector<double>& ell, const std::vector<double>& prob,
                                double log_threshold, std::size_t n_max) {
  constexpr std::size_t kStateLimit = 4'000'000;
  using Key = std::array<std::uint32_t, 4>;
  const std::size_t m = ell.size();
  StopDistribution out;
  out.pmf.assign(n_max, 0.0);
  std::map<Key, double> mass{{Key{}, 1.0}};
  double dropped = 0.0;
  for (std::size_t k = 1; k <= n_max; ++k) {
    std::map<Key, double> next;
    for (const auto& [key, p] : mass) {
      for (std::size_t j = 0; j < m; ++j) {
        Key moved = key;
        ++moved[j];
        next[moved] += p * prob[j];
      }
    }
    double stopped = 0.0;
    for (auto it = next.begin(); it != next.end();) {
      double log_m = 0.0;
      for (std::size_t j = 0; j < m; ++j) log_m += scaled_log(it->first[j], ell[j]);
      if (log_m >= log_threshold) {
        stopped += it->second;
        it = next.erase(it);
      } else if (it->second < kNegligibleMass) {
        dropped += it->second;
        it = next.erase(it);
      } else {
        ++it;
      }
    }
    out.pmf[k - 1] = stopped;
    if (next.size() > kStateLimit) {
      throw Error(ErrorCode::kStateSpaceTooLarge,
                  "exact stopping distribution exceeded " + std::to_string(kStateLimit) +
                      " lattice states at step " + std::to_string(k));
    }
    mass = std::move(next);
    if (mass.empty()) break;
  }
  double alive = dropped;
  for (const auto& [key, p] : mass) alive += p;
  finish_summary(out);
  out.mass_not_stopped = alive;
  return out;
}

}  // namespace

StopDistribution exact_stop_dist(const DistributionSpec& dist, const TestConfig& cfg, double c,
                                 std::size_t n_max) {
  cfg.validate();
  validate(dist, &cfg);
  check_stake(c, 0);
  const auto fs = as_finite(dist);
  if (!fs) {
    throw Error(ErrorCode::kStateSpaceTooLarge,
                "exact stopping distribution needs a finite-support law");
  }
  const std::size_t m = fs->points.size();
  if (m > 4) {
    throw Error(ErrorCode::kStateSpaceTooLarge,
                "exact stopping distribution supports at most 4 support points, got " +
                    std::to_string(m));
  }
  const Side side = default_side(cfg);
  const double log_threshold = cfg.log_threshold();
  if (m == 1) {
    StopDistribution out;
    out.pmf.assign(n_max, 0.0);
    try {
      const std::size_t n = deterministic_n(fs->points[0], cfg, ConstantStake{c});
      if (n <= n_max) out.pmf[n - 1] = 1.0;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNeverRejects) throw;
    }
    finish_summary(out);
    out.mass_not_stopped = 1.0 - out.mass_stopped;
    return out;
  }
  std::vector<double> ell;
  for (double t : fs->points) {
    const double f = 1.0 - c * normalized_deviation(side, t, cfg);
    ell.push_back(f <= 0.0 ? kNegInf : std::log(f));
  }
  if (m == 2) {
    return two_point_dp({ell[0], ell[1]}, {fs->probs[0], fs->probs[1]}, log_threshold, n_max);
  }
  return multi_point_dp(ell, fs->probs, log_threshold, n_max);
}

double inverse_signal_threshold(const TestConfig& cfg, double c) {
  if (!cfg.tau0) throw Error(ErrorCode::kInvalidConfig, "tau0: required for the inverse signal");
  return (1.0 - c) * cfg.mu + c * *cfg.tau0;
}

}  // namespace anytime
