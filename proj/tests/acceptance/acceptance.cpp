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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "anytime/analysis.hpp"
#include "anytime/confidence.hpp"
#include "anytime/martingale.hpp"
#include "anytime/sequential.hpp"
#include "anytime/session.hpp"
#include "anytime/simulation.hpp"

namespace {

using namespace anytime;
using Clock = std::chrono::steady_clock;

TestConfig audit(double mu = 0.05) {
  TestConfig cfg;
  cfg.mu = mu;
  cfg.tau0 = 0.0;
  cfg.tau1 = 1.0;
  cfg.alpha = 0.05;
  return cfg;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Accumulates failures for one criterion.
struct Check {
  std::vector<std::string> failures;
  std::ostringstream notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s.precision(12);
    s << what << ": got " << got << ", want " << want << " +- " << tol;
    expect(std::abs(got - want) <= tol, s.str());
  }
};

void deterministic_table(Check& c) {
  const auto start = Clock::now();
  const TestConfig cfg = audit();
  const std::pair<double, std::size_t> rows[] = {
      {0.2, 476}, {0.4, 239}, {0.6, 160}, {0.8, 121}, {1.0, 97}};
  for (const auto& [stake, n] : rows) {
    const std::size_t got = deterministic_n(0.02, cfg, ConstantStake{stake});
    c.expect(got == n, "c=" + std::to_string(stake) + " gave " + std::to_string(got));
    c.notes << " c=" << stake << ":" << got;
  }
  const std::size_t mix = deterministic_n(0.02, cfg, MixtureSpec::uniform(0.6, 1.0));
  c.expect(mix == 117, "mixture gave " + std::to_string(mix));
  c.notes << " U[0.6,1]:" << mix;
  const double t = seconds_since(start);
  c.expect(t < 1.0, "took " + std::to_string(t) + " s");
  c.notes << " (" << t << " s)";
}

void deterministic_precision(Check& c) {
  Scenario sc;
  sc.id = "precision";
  sc.dist = PointMass{0.02};
  sc.cfg = audit();
  sc.policy = MixtureSpec::uniform(0.6, 1.0);
  sc.stop_rule = StopRule::kBoth;
  const TrialRecord r = run_trial(sc, std::vector<double>(1000, 0.02));
  c.expect(r.n_precision == std::optional<std::size_t>(70), "precision stop not at 70");
  c.expect(r.n_reject == std::optional<std::size_t>(117), "rejection not at 117");
  c.near(r.mean_at_stop, 0.02, 1e-15, "mean at precision stop");
  c.notes << " n_precision=" << r.n_precision.value_or(0) << " n_reject=" << r.n_reject.value_or(0)
          << " mean=" << r.mean_at_stop << " U=" << r.bound_at_stop;
}

void monte_carlo_table(Check& c) {
  const auto start = Clock::now();
  const struct {
    DistributionSpec dist;
    double stake, mean, sd;
  } rows[] = {{Alt{0.02}, 0.6, 245.9, 169.2},
              {BetaDist{2, 98}, 1.0, 97.2, 4.5},
              {ScaledAlt{0.2, 0.1}, 1.0, 104.0, 23.4}};
  for (const auto& row : rows) {
    Scenario sc;
    sc.id = describe(row.dist);
    sc.dist = row.dist;
    sc.cfg = audit();
    sc.policy = ConstantStake{row.stake};
    sc.runs = 200;
    sc.seed = 20240601;
    const RunSummary s = experiment(sc, 0);
    c.near(s.n.mean, row.mean, 3 * row.sd / std::sqrt(200.0), sc.id + " mean N");
    c.expect(s.n.count == 200, sc.id + ": not every run rejected");
    c.notes << " " << sc.id << ":" << s.n.mean;
  }
  const double t = seconds_since(start);
  c.expect(t < 60.0, "took " + std::to_string(t) + " s");
  c.notes << " (" << t << " s)";
}

void dp_oracle(Check& c) {
  const TestConfig cfg = audit();
  for (double stake : {0.2, 0.4, 0.6, 0.8}) {
    const StopDistribution dp = exact_stop_dist(Alt{0.02}, cfg, stake, 20000);
    Scenario sc;
    sc.id = "alt";
    sc.dist = Alt{0.02};
    sc.cfg = cfg;
    sc.policy = ConstantStake{stake};
    sc.runs = 200;
    sc.seed = 20240601;
    sc.cap = 20000;
    const RunSummary s = experiment(sc, 0);
    const double se = s.n.sd / std::sqrt(static_cast<double>(s.n.count));
    std::ostringstream what;
    what << "c=" << stake << " exact " << dp.mean << " vs MC " << s.n.mean;
    c.expect(std::abs(dp.mean - s.n.mean) <= 3 * se, what.str());
    c.notes << " c=" << stake << ":" << dp.mean << "/" << s.n.mean;
  }
  for (double stake : {0.4, 1.0}) {
    const StopDistribution dp = exact_stop_dist(PointMass{0.02}, cfg, stake, 2000);
    const std::size_t n = deterministic_n(0.02, cfg, ConstantStake{stake});
    c.expect(dp.mean == static_cast<double>(n) && dp.sd == 0.0 && dp.mass_stopped == 1.0,
             "point mass law differs from the deterministic count");
  }
}

void analysis_values(Check& c) {
  const TestConfig cfg = audit();
  const double cmax = c_max(Alt{0.02}, cfg);
  c.near(cmax, 0.895, 1e-3, "c_max");
  const OptimalStake opt = c_opt(Alt{0.02}, cfg);
  c.near(opt.c, 0.60, 1e-6, "c_opt");
  c.near(opt.lambda_at, 0.012, 5e-4, "lambda(c_opt)");
  c.near(kl_alt(0.02, 0.05), lambda_fn(Alt{0.02}, cfg, 0.6), 1e-10, "kl vs lambda(0.6)");
  c.notes << " c_max=" << cmax << " c_opt=" << opt.c << " lambda=" << opt.lambda_at;
}

void size_sandwich(Check& c) {
  const auto start = Clock::now();
  const TestConfig cfg = audit();
  const StopDistribution dp = exact_stop_dist(Alt{0.05}, cfg, 0.6, 100000);
  const double lower = size_bounds(cfg, 0.6).lower;
  c.near(lower, 0.048469, 5e-7, "formula lower bound");
  c.expect(dp.mass_stopped > 0.0484 && dp.mass_stopped < 0.05,
           "rejection mass " + std::to_string(dp.mass_stopped) + " outside (0.0484, 0.05)");
  c.notes << " mass=" << dp.mass_stopped << " lower=" << lower << " (" << seconds_since(start)
          << " s)";
}

std::vector<double> draws(const DistributionSpec& dist, std::size_t n, std::uint64_t seed) {
  return sample(dist, n, seed);
}

void properties(Check& c) {
  const TestConfig cfg = audit();
  // Martingale identity over two-point laws with mean mu.
  double worst = 0.0;
  for (double a : {0.0, 0.01, 0.03, 0.049}) {
    for (double b : {0.06, 0.3, 0.9, 1.0}) {
      const double p = (cfg.mu - a) / (b - a);
      for (double stake : {0.1, 0.5, 0.9, 1.0}) {
        const double e = (1 - p) * factor(Side::kUpper, a, cfg, stake) +
                         p * factor(Side::kUpper, b, cfg, stake);
        worst = std::max(worst, std::abs(e - 1.0));
      }
    }
  }
  c.expect(worst <= 1e-12, "martingale identity off by " + std::to_string(worst));
  c.notes << " identity=" << worst;

  // log M_n(c) concave in c; lambda concave in c.
  const auto data = draws(BetaDist{2, 30}, 200, 5);
  auto log_m = [&](double stake) {
    MartingaleState s;
    for (double t : data) s = step(s, t, stake, cfg);
    return s.log_m;
  };
  bool concave = true;
  for (double x = 0.01; x < 0.99; x += 0.01) {
    concave = concave && log_m(x + 0.01) - 2 * log_m(x) + log_m(x - 0.01) <= 1e-12;
    concave = concave && lambda_fn(Alt{0.02}, cfg, x + 0.01) - 2 * lambda_fn(Alt{0.02}, cfg, x) +
                                 lambda_fn(Alt{0.02}, cfg, x - 0.01) <=
                             1e-14;
    concave = concave && lambda_fn(BetaDist{2, 98}, cfg, x + 0.01) -
                                 2 * lambda_fn(BetaDist{2, 98}, cfg, x) +
                                 lambda_fn(BetaDist{2, 98}, cfg, x - 0.01) <=
                             1e-12;
  }
  c.expect(concave, "log M_n(c) or lambda not concave");

  // M_k^mu non-decreasing in mu.
  bool monotone = true;
  for (const StakePolicy& policy :
       {StakePolicy{ConstantStake{0.7}}, StakePolicy{MixtureSpec::uniform(0.0, 1.0)},
        StakePolicy{PowerFamily{0.1, 1.0, 0.5, 0.02}}}) {
    SuitableFamily family(cfg, policy);
    for (std::size_t k = 0; k < 120; ++k) {
      family.observe(data[k]);
      if (k % 30 != 29) continue;
      double prev = kNegInf;
      for (double mu = 0.005; mu < 0.999; mu += 0.005) {
        const double v = family.log_value(mu);
        monotone = monotone && v >= prev - 1e-12;
        prev = v;
      }
    }
  }
  c.expect(monotone, "M_k^mu not monotone in mu");

  // M_n^mu(pi) convex in mu.
  TestConfig two = audit(0.5);
  two.side = TwoSided{};
  IntervalFamily mix(two, MixtureSpec::uniform(-1.0, 1.0));
  bool convex = true;
  for (double t : draws(BetaDist{2, 5}, 80, 6)) mix.observe(t);
  for (double mu = 0.01; mu < 0.99; mu += 0.005) {
    const double l = std::exp(mix.log_value(mu - 0.005));
    const double m = std::exp(mix.log_value(mu));
    const double r = std::exp(mix.log_value(mu + 0.005));
    convex = convex && l + r - 2 * m >= -1e-9 * m;
  }
  c.expect(convex, "mixture not convex in mu");

  // Sample mean inside intervals and below finite bounds.
  bool inside = true;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto xs = draws(BetaDist{1.5, 6}, 150, seed);
    const auto bounds = bound_trajectory(xs, cfg, MixtureSpec::uniform(0.0, 1.0));
    const auto ivs = interval_trajectory(xs, two, MixtureSpec::uniform(-1.0, 1.0));
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sum += xs[i];
      const double mean = sum / static_cast<double>(i + 1);
      if (std::isfinite(bounds[i].mu_r)) inside = inside && bounds[i].mu_r > mean;
      inside = inside && ivs[i].at_k.lo < mean && mean < ivs[i].at_k.hi;
      if (ivs[i].running) inside = inside && ivs[i].running->lo < mean && mean < ivs[i].running->hi;
    }
  }
  c.expect(inside, "sample mean outside an interval or above a bound");

  // Running-bound coverage.
  const std::size_t runs = 1000;
  std::size_t covered = 0;
  for (std::size_t run = 0; run < runs; ++run) {
    Sampler sampler(Alt{0.2}, 4242, run);
    RunningUpperBound bound(cfg, MixtureSpec::uniform(0.0, 1.0));
    bool ok = true;
    for (std::size_t k = 0; k < 300 && ok; ++k) ok = bound.observe(sampler.next()).running_min >= 0.2;
    covered += ok;
  }
  const double rate = static_cast<double>(covered) / runs;
  const double se = std::sqrt(cfg.alpha * (1 - cfg.alpha) / runs);
  c.expect(rate >= 1 - cfg.alpha - 3 * se, "coverage " + std::to_string(rate));
  c.notes << " coverage=" << rate;
}

void replay_determinism(Check& c) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "anytime_acceptance_sessions";
  fs::remove_all(dir);
  std::vector<std::string> ids;
  std::vector<std::string> states;
  {
    SessionStore store(dir);
    ids.push_back(store.create(audit(), MixtureSpec::uniform(0.0, 1.0)));
    ids.push_back(store.create(audit(), ConstantStake{0.6}));
    const auto xs = draws(BetaDist{2, 40}, 150, 9);
    for (std::size_t k = 1; k <= xs.size(); ++k) {
      for (const auto& id : ids) store.append_observation(id, xs[k - 1], k);
      if (k == 60) store.change_policy(ids[0], PowerFamily{0.1, 1.0, 0.5, 0.02}, k);
    }
    for (const auto& id : ids) states.push_back(store.state(id).dump());
  }
  try {
    SessionStore reopened(dir);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      c.expect(reopened.state(ids[i]).dump() == states[i], "replayed state differs for " + ids[i]);
      c.expect(reopened.verify_replay(ids[i]), "verify_replay failed for " + ids[i]);
    }
  } catch (const std::exception& e) {
    c.expect(false, std::string("reopen failed: ") + e.what());
  }
  fs::remove_all(dir);

  Scenario sc;
  sc.id = "rerun";
  sc.dist = BetaDist{2, 98};
  sc.cfg = audit();
  sc.policy = MixtureSpec::uniform(0.6, 1.0);
  sc.stop_rule = StopRule::kBoth;
  sc.runs = 100;
  sc.seed = 77;
  const std::string a = summary_csv_row(sc, experiment(sc, 1));
  const std::string b = summary_csv_row(sc, experiment(sc, 0));
  c.expect(a == b, "scenario rerun CSV differs");
  c.notes << " sessions=" << ids.size();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"deterministic sample numbers for constant 0.02 streams", deterministic_table},
      {"precision stop at 70, rejection at 117", deterministic_precision},
      {"Monte Carlo mean sample numbers", monte_carlo_table},
      {"exact stopping law agrees with Monte Carlo", dp_oracle},
      {"growth analysis: c_max, c_opt, lambda, kl", analysis_values},
      {"rejection probability under the null within bounds", size_sandwich},
      {"martingale, concavity, monotonicity, convexity, coverage", properties},
      {"session replay and scenario reruns are bit-identical", replay_determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Check check;
    try {
      fn(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = check.failures.empty();
    failed += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << " [" << index << "] " << name << " --"
              << check.notes.str() << '\n';
    for (const auto& f : check.failures) std::cout << "    " << f << '\n';
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
