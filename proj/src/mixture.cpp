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

#include "anytime/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "anytime/error.hpp"
#include "anytime/kernels.hpp"
#include "anytime/martingale.hpp"
#include "anytime/quadrature.hpp"

namespace anytime {
namespace {

void append_uniform_region(std::vector<std::pair<double, double>>& out, double a, double b,
                           double mass, std::size_t node_count) {
  const QuadratureRule rule = gauss_legendre(node_count, a, b);
  for (std::size_t i = 0; i < node_count; ++i) {
    out.emplace_back(rule.nodes[i], rule.weights[i] / (b - a) * mass);
  }
}

}  // namespace

MixtureState mixture_init(const MixtureSpec& spec, std::size_t node_count) {
  spec.validate();
  std::vector<std::pair<double, double>> nodes;  // (stake, weight)
  if (const auto* wn = std::get_if<WeightedNodes>(&spec.density)) {
    for (std::size_t i = 0; i < wn->nodes.size(); ++i) nodes.emplace_back(wn->nodes[i], wn->weights[i]);
  } else {
    if (node_count < 2) throw Error(ErrorCode::kInvalidMixture, "mixture needs at least 2 nodes");
    const double width = spec.hi - spec.lo;
    if (spec.two_sided()) {
      append_uniform_region(nodes, spec.lo, 0.0, -spec.lo / width, node_count);
      append_uniform_region(nodes, 0.0, spec.hi, spec.hi / width, node_count);
    } else {
      append_uniform_region(nodes, spec.lo, spec.hi, 1.0, node_count);
    }
  }
  std::stable_sort(nodes.begin(), nodes.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });

  auto grid = std::make_shared<MixtureGrid>();
  for (const auto& [c, w] : nodes) {
    grid->stakes.push_back(c);
    grid->log_weights.push_back(std::log(w));
    if (c < 0.0) ++grid->negative_count;
  }
  MixtureState state;
  state.log_vals.assign(grid->stakes.size(), 0.0);
  state.grid = std::move(grid);
  return state;
}

void mixture_absorb(MixtureState& state, double t, const TestConfig& cfg, double multiplicity) {
  const MixtureGrid& grid = *state.grid;
  const std::size_t neg = grid.negative_count;
  const std::size_t total = grid.stakes.size();
  const std::size_t index = state.k + 1;
  cfg.check_observation(t, index);
  const bool has_positive = std::any_of(grid.stakes.begin() + static_cast<std::ptrdiff_t>(neg),
                                        grid.stakes.end(), [](double c) { return c > 0.0; });
  if (neg > 0) {
    if (!cfg.tau0) throw Error(ErrorCode::kInvalidConfig, "tau0: required by negative stakes");
    // c < 0: 1 - c (t - mu)/(mu - tau0)
    const double z = (t - cfg.mu) / (cfg.mu - *cfg.tau0);
    kernels::active().accumulate_log_affine(state.log_vals.data(), grid.stakes.data(), neg, z,
                                            multiplicity);
  }
  if (total > neg) {
    double z = 0.0;
    if (has_positive) {
      if (!cfg.tau1) throw Error(ErrorCode::kInvalidConfig, "tau1: required by positive stakes");
      z = (t - cfg.mu) / (*cfg.tau1 - cfg.mu);
    }
    kernels::active().accumulate_log_affine(state.log_vals.data() + neg, grid.stakes.data() + neg,
                                            total - neg, z, multiplicity);
  }
  state.k += static_cast<std::size_t>(multiplicity);
}

MixtureState mixture_update(const MixtureState& state, double t, const TestConfig& cfg) {
  MixtureState next = state;
  mixture_absorb(next, t, cfg);
  return next;
}

double mixture_value(const MixtureState& state) {
  const MixtureGrid& grid = *state.grid;
  return kernels::active().log_sum_exp(grid.log_weights.data(), state.log_vals.data(),
                                       state.log_vals.size());
}

double effective_c(const MixtureState& state) {
  const MixtureGrid& grid = *state.grid;
  const std::size_t n = state.log_vals.size();
  double shift = kNegInf;
  for (std::size_t i = 0; i < n; ++i) shift = std::max(shift, grid.log_weights[i] + state.log_vals[i]);
  if (shift == kNegInf) {
    throw Error(ErrorCode::kUndefinedEffectiveStake,
                "every mixture node is absorbed; the effective stake is undefined");
  }
  double s0 = 0.0;
  double s1 = 0.0;
  kernels::active().exp_moments(grid.log_weights.data(), state.log_vals.data(), grid.stakes.data(),
                                n, shift, &s0, &s1);
  return s1 / s0;
}

}  // namespace anytime
