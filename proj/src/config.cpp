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

#include "anytime/config.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "anytime/error.hpp"

namespace anytime {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig: return "invalid_config";
    case ErrorCode::kOutOfBounds: return "out_of_bounds";
    case ErrorCode::kInvalidStake: return "invalid_stake";
    case ErrorCode::kStreamDesync: return "stream_desync";
    case ErrorCode::kInvalidMixture: return "invalid_mixture";
    case ErrorCode::kUndefinedEffectiveStake: return "undefined_effective_stake";
    case ErrorCode::kNoPositiveGrowth: return "no_positive_growth";
    case ErrorCode::kInfiniteExpectedSample: return "infinite_expected_sample";
    case ErrorCode::kNeverRejects: return "never_rejects";
    case ErrorCode::kStateSpaceTooLarge: return "state_space_too_large";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kInvalidPolicy: return "invalid_policy";
  }
  return "unknown";
}

namespace {

void collect_bound_problems(const TestConfig& cfg, std::vector<std::string>& problems) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) problems.emplace_back("alpha: must lie in (0,1)");
  if (cfg.tau0 && !std::isfinite(*cfg.tau0)) problems.emplace_back("tau0: must be finite");
  if (cfg.tau1 && !std::isfinite(*cfg.tau1)) problems.emplace_back("tau1: must be finite");
  if (cfg.tau0 && cfg.tau1 && !(*cfg.tau0 < *cfg.tau1)) {
    problems.emplace_back("tau0,tau1: need tau0 < tau1");
  }
}

[[noreturn]] void raise(const std::vector<std::string>& problems) {
  std::string msg = "invalid test configuration:";
  for (const auto& p : problems) msg += " " + p + ";";
  throw Error(ErrorCode::kInvalidConfig, msg);
}

}  // namespace

void TestConfig::validate_bounds() const {
  std::vector<std::string> problems;
  collect_bound_problems(*this, problems);
  if (!tau0 && !tau1) problems.emplace_back("tau0,tau1: at least one bound is required");
  if (!problems.empty()) raise(problems);
}

void TestConfig::validate() const {
  std::vector<std::string> problems;
  collect_bound_problems(*this, problems);
  if (!std::isfinite(mu)) problems.emplace_back("mu: must be finite");
  const bool need_upper = !std::holds_alternative<LowerNull>(side);
  const bool need_lower = !std::holds_alternative<UpperNull>(side);
  if (need_upper) {
    if (!tau1) {
      problems.emplace_back("tau1: required for this side");
    } else if (!(mu < *tau1)) {
      problems.emplace_back("mu: must be < tau1");
    }
  }
  if (need_lower) {
    if (!tau0) {
      problems.emplace_back("tau0: required for this side");
    } else if (!(mu > *tau0)) {
      problems.emplace_back("mu: must be > tau0");
    }
  }
  if (const auto* two = std::get_if<TwoSided>(&side)) {
    if (!(two->rho_plus >= 0.0 && two->rho_plus <= 1.0)) {
      problems.emplace_back("rho_plus: must lie in [0,1]");
    }
  }
  if (!problems.empty()) raise(problems);
}

void TestConfig::check_observation(double t, std::size_t index) const {
  if (!std::isfinite(t)) {
    throw Error(ErrorCode::kOutOfBounds,
                "observation " + std::to_string(index) + " is not a finite number", index);
  }
  if ((tau0 && t < *tau0) || (tau1 && t > *tau1)) {
    throw Error(ErrorCode::kOutOfBounds,
                "observation " + std::to_string(index) + " (" + std::to_string(t) +
                    ") lies outside the configured support",
                index);
  }
}

double TestConfig::log_threshold() const { return std::log(1.0 / alpha); }

double TestConfig::rho_plus() const {
  if (std::holds_alternative<UpperNull>(side)) return 1.0;
  if (std::holds_alternative<LowerNull>(side)) return 0.0;
  return std::get<TwoSided>(side).rho_plus;
}

TestConfig TestConfig::with_mu(double new_mu) const {
  TestConfig out = *this;
  out.mu = new_mu;
  return out;
}

}  // namespace anytime
