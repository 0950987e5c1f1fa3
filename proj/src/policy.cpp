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

#include "anytime/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "anytime/error.hpp"

namespace anytime {

void MixtureSpec::validate() const {
  if (!(lo >= -1.0 && hi <= 1.0 && lo < hi)) {
    throw Error(ErrorCode::kInvalidMixture,
                "mixture support must satisfy -1 <= lo < hi <= 1, got [" + std::to_string(lo) +
                    "," + std::to_string(hi) + "]");
  }
  if (const auto* wn = std::get_if<WeightedNodes>(&density)) {
    if (wn->nodes.empty() || wn->nodes.size() != wn->weights.size()) {
      throw Error(ErrorCode::kInvalidMixture, "weighted nodes: need equal, non-zero lengths");
    }
    for (std::size_t i = 0; i < wn->nodes.size(); ++i) {
      if (!(wn->nodes[i] >= lo && wn->nodes[i] <= hi)) {
        throw Error(ErrorCode::kInvalidMixture,
                    "weighted nodes: node " + std::to_string(i) + " outside the support");
      }
      if (!(wn->weights[i] > 0.0)) {
        throw Error(ErrorCode::kInvalidMixture,
                    "weighted nodes: weight " + std::to_string(i) + " must be positive");
      }
    }
    const double total = std::accumulate(wn->weights.begin(), wn->weights.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) {
      throw Error(ErrorCode::kInvalidMixture, "weighted nodes: weights must sum to 1");
    }
  }
}

void MixtureSpec::validate_one_sided() const {
  validate();
  if (lo < 0.0) {
    throw Error(ErrorCode::kInvalidMixture, "one-sided mixtures need support within [0,1]");
  }
}

MixtureSpec MixtureSpec::mirrored() const {
  MixtureSpec out{-hi, -lo, density};
  if (auto* wn = std::get_if<WeightedNodes>(&out.density)) {
    for (double& c : wn->nodes) c = -c;
  }
  return out;
}

double StakeSchedule::stake_for_step(std::size_t k) const {
  if (stakes.empty()) throw Error(ErrorCode::kInvalidPolicy, "empty stake schedule");
  const std::size_t i = k == 0 ? 0 : std::min(k - 1, stakes.size() - 1);
  return stakes[i];
}

double PowerFamily::stake(double mu, const TestConfig& cfg) const {
  if (!cfg.tau0 || !cfg.tau1) {
    throw Error(ErrorCode::kInvalidPolicy, "power family needs both tau0 and tau1");
  }
  return d * std::pow(*cfg.tau1 - mu, r) / std::pow(mu - *cfg.tau0, s);
}

double PowerFamily::d_cap(const TestConfig& cfg) const {
  if (!cfg.tau0 || !cfg.tau1) {
    throw Error(ErrorCode::kInvalidPolicy, "power family needs both tau0 and tau1");
  }
  return std::pow(m, s) / std::pow(*cfg.tau1 - *cfg.tau0 - m, r);
}

double PowerFamily::min_mu(const TestConfig& cfg) const {
  if (!cfg.tau0) throw Error(ErrorCode::kInvalidPolicy, "power family needs tau0");
  return *cfg.tau0 + m;
}

const char* policy_kind(const StakePolicy& policy) {
  switch (policy.index()) {
    case 0: return "constant";
    case 1: return "schedule";
    case 2: return "power";
    default: return "mixture";
  }
}

}  // namespace anytime
