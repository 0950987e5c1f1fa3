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

#include "anytime/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "anytime/confidence.hpp"
#include "anytime/error.hpp"
#include "anytime/format.hpp"
#include "anytime/martingale.hpp"
#include "anytime/sequential.hpp"

namespace anytime {

const char* to_string(StopRule rule) {
  switch (rule) {
    case StopRule::kRejectAtAlpha: return "reject";
    case StopRule::kPrecision: return "precision";
    case StopRule::kBoth: return "both";
  }
  return "?";
}

StopRule parse_stop_rule(const std::string& text) {
  if (text == "reject") return StopRule::kRejectAtAlpha;
  if (text == "precision") return StopRule::kPrecision;
  if (text == "both") return StopRule::kBoth;
  throw Error(ErrorCode::kParse, "stop rule must be reject, precision or both, got '" + text + "'");
}

void Scenario::validate() const {
  cfg.validate();
  anytime::validate(dist, &cfg);
  validate_policy(policy, cfg);
  if (runs < 1) throw Error(ErrorCode::kInvalidConfig, "runs: must be at least 1");
  if (cap < 1) throw Error(ErrorCode::kInvalidConfig, "cap: must be at least 1");
  if (stop_rule != StopRule::kRejectAtAlpha) {
    if (!(precision_m > 0.0)) throw Error(ErrorCode::kInvalidConfig, "precision_m: must be > 0");
    if (cap < min_n) throw Error(ErrorCode::kInvalidConfig, "cap: must be >= min_n");
  }
}

Sampler::Sampler(DistributionSpec dist, std::uint64_t seed, std::uint64_t run)
    : dist_(std::move(dist)) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(run >> 32)};
  rng_.seed(seq);
  if (const auto* beta = std::get_if<BetaDist>(&dist_)) {
    gamma_a_.emplace(beta->a, 1.0);
    gamma_b_.emplace(beta->b, 1.0);
  } else if (!std::holds_alternative<Alt>(dist_)) {
    const FiniteSupport fs = *as_finite(dist_);
    points_ = fs.points;
    double total = 0.0;
    for (double p : fs.probs) cdf_.push_back(total += p);
  }
}

double Sampler::next() {
  if (const auto* alt = std::get_if<Alt>(&dist_)) return unit_(rng_) < alt->nu ? 1.0 : 0.0;
  if (gamma_a_) {
    const double x = (*gamma_a_)(rng_);
    const double y = (*gamma_b_)(rng_);
    return x / (x + y);
  }
  if (points_.size() == 1) return points_.front();
  const double u = unit_(rng_) * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return points_[std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()),
                                       points_.size() - 1)];
}

std::vector<double> sample(const DistributionSpec& dist, std::size_t n, std::uint64_t seed) {
  Sampler sampler(dist, seed);
  std::vector<double> out(n);
  for (double& t : out) t = sampler.next();
  return out;
}

namespace {

TrialRecord run_stream(const Scenario& sc, const std::function<std::optional<double>()>& draw) {
  const bool want_precision = sc.stop_rule != StopRule::kRejectAtAlpha;
  const bool want_reject = sc.stop_rule != StopRule::kPrecision;
  const double log_threshold = sc.cfg.log_threshold();

  const auto* constant = std::get_if<ConstantStake>(&sc.policy);
  std::optional<SequentialTest> test;
  MartingaleState fixed;
  const Side side = std::holds_alternative<TwoSided>(sc.cfg.side) ? Side::kUpper
                                                                   : default_side(sc.cfg);
  const bool fast = constant && !std::holds_alternative<TwoSided>(sc.cfg.side);
  if (!fast) test.emplace(sc.cfg, sc.policy);

  std::optional<SuitableFamily> family;
  if (want_precision) family.emplace(sc.cfg, sc.policy);

  TrialRecord rec;
  rec.bound_at_stop = kInf;
  double sum = 0.0;
  for (std::size_t k = 1; k <= sc.cap; ++k) {
    const auto t = draw();
    if (!t) break;
    rec.steps = k;
    sum += *t;
    const double mean = sum / static_cast<double>(k);
    if (!rec.n_reject) {
      bool rejected = false;
      if (fast) {
        fixed = step(fixed, *t, constant->c, sc.cfg, side);
        rejected = decision(fixed.log_m_max, sc.cfg.alpha) == Decision::kReject;
      } else {
        rejected = test->observe(*t).decision == Decision::kReject;
      }
      if (rejected) {
        rec.n_reject = k;
        if (!want_precision) rec.mean_at_stop = mean;
      }
    }
    if (family && !rec.n_precision) {
      family->observe(*t);
      const double x = mean + sc.precision_m;
      if (k >= sc.min_n && x < *sc.cfg.tau1 && family->log_value(x) >= log_threshold) {
        rec.n_precision = k;
        rec.mean_at_stop = mean;
        rec.bound_at_stop = at_k_upper_bound(*family);
      }
    }
    const bool done_reject = !want_reject || rec.n_reject;
    const bool done_precision = !want_precision || rec.n_precision;
    if (done_reject && done_precision) return rec;
  }
  rec.capped = true;
  if (rec.steps > 0 && !(want_precision ? rec.n_precision : rec.n_reject)) {
    rec.mean_at_stop = sum / static_cast<double>(rec.steps);
  }
  return rec;
}

NStats n_stats(std::vector<double> values) {
  NStats out;
  out.count = values.size();
  if (values.empty()) return out;
  double total = 0.0;
  for (double v : values) total += v;
  out.mean = total / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    out.se = out.sd / std::sqrt(static_cast<double>(values.size()));
  }
  std::sort(values.begin(), values.end());
  auto rank = [&](double q) {
    const auto r = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
    return values[std::max<std::size_t>(r, 1) - 1];
  };
  out.q50 = rank(0.50);
  out.q75 = rank(0.75);
  out.q90 = rank(0.90);
  return out;
}

}  // namespace

TrialRecord run_trial(const Scenario& scenario, std::uint64_t run) {
  scenario.validate();
  Sampler sampler(scenario.dist, scenario.seed, run);
  return run_stream(scenario, [&]() -> std::optional<double> { return sampler.next(); });
}

TrialRecord run_trial(const Scenario& scenario, const std::vector<double>& stream) {
  scenario.cfg.validate();
  validate_policy(scenario.policy, scenario.cfg);
  std::size_t i = 0;
  return run_stream(scenario, [&]() -> std::optional<double> {
    if (i == stream.size()) return std::nullopt;
    return stream[i++];
  });
}

RunSummary summarize(const Scenario& scenario, const std::vector<TrialRecord>& trials) {
  RunSummary out;
  out.runs = trials.size();
  std::vector<double> primary;
  std::vector<double> precision;
  std::vector<double> tbar;
  std::size_t rejected = 0;
  for (const TrialRecord& rec : trials) {
    const auto& event = scenario.stop_rule == StopRule::kPrecision ? rec.n_precision : rec.n_reject;
    if (event) primary.push_back(static_cast<double>(*event));
    if (rec.n_precision) precision.push_back(static_cast<double>(*rec.n_precision));
    if (rec.n_reject) ++rejected;
    if (rec.capped) {
      ++out.not_stopped_count;
    } else {
      tbar.push_back(rec.mean_at_stop);
    }
  }
  out.n = n_stats(std::move(primary));
  out.n_precision = n_stats(std::move(precision));
  const NStats t = n_stats(std::move(tbar));
  out.mean_tbar = t.mean;
  out.sd_tbar = t.sd;
  if (out.runs > 0) {
    const double runs = static_cast<double>(out.runs);
    out.reject_rate = static_cast<double>(rejected) / runs;
    out.reject_se = std::sqrt(out.reject_rate * (1.0 - out.reject_rate) / runs);
  }
  return out;
}

RunSummary experiment(const Scenario& scenario, unsigned threads) {
  scenario.validate();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, scenario.runs));
  std::vector<TrialRecord> trials(scenario.runs);
  auto work = [&](unsigned worker) {
    for (std::size_t run = worker; run < scenario.runs; run += threads) {
      Sampler sampler(scenario.dist, scenario.seed, run);
      trials[run] =
          run_stream(scenario, [&]() -> std::optional<double> { return sampler.next(); });
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  return summarize(scenario, trials);
}

std::string summary_csv_header() {
  return "scenario,dist,policy,stop_rule,runs,mean_n,sd_n,se_n,q50_n,q75_n,q90_n,"
         "mean_n_precision,sd_n_precision,mean_tbar,sd_tbar,reject_rate,reject_se,not_stopped";
}

std::string summary_csv_row(const Scenario& scenario, const RunSummary& s) {
  std::string row = csv_field(scenario.id) + "," + csv_field(describe(scenario.dist)) + "," +
                    csv_field(describe_policy(scenario.policy)) + "," +
                    to_string(scenario.stop_rule) + "," +
                    std::to_string(s.runs);
  for (double v : {s.n.mean, s.n.sd, s.n.se, s.n.q50, s.n.q75, s.n.q90, s.n_precision.mean,
                   s.n_precision.sd, s.mean_tbar, s.sd_tbar, s.reject_rate, s.reject_se}) {
    row += "," + format_number(v);
  }
  row += "," + std::to_string(s.not_stopped_count);
  return row;
}

}  // namespace anytime
