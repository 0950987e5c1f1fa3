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
#include <memory>
#include <vector>

#include "anytime/config.hpp"
#include "anytime/policy.hpp"

namespace anytime {

// Fixed stake grid for an integrated martingale. Negative stakes come first
// (lower-side factors), then stakes >= 0 (upper-side factors).
struct MixtureGrid {
  std::vector<double> stakes;
  std::vector<double> log_weights;
  std::size_t negative_count = 0;
};

// M_k(c_i) for every grid node, in log space. The grid is shared and never
// changes after construction, so copies are cheap and the implied stake
// process stays predictable.
struct MixtureState {
  std::shared_ptr<const MixtureGrid> grid;
  std::vector<double> log_vals;
  std::size_t k = 0;
};

inline constexpr std::size_t kDefaultMixtureNodes = 64;

// Gauss-Legendre nodes per sign region for a uniform density; the given nodes
// as-is for WeightedNodes (node_count is then ignored).
MixtureState mixture_init(const MixtureSpec& spec, std::size_t node_count = kDefaultMixtureNodes);

MixtureState mixture_update(const MixtureState& state, double t, const TestConfig& cfg);

// In-place variant; `multiplicity` applies the same observation that many
// times in one pass (used for histogram-compressed histories).
void mixture_absorb(MixtureState& state, double t, const TestConfig& cfg,
                    double multiplicity = 1.0);

// log M_k(pi); 0 for a fresh state, -inf once every node is absorbed.
double mixture_value(const MixtureState& state);

// Stake-weighted mean under f(c) proportional to M_k(c) pi(c).
double effective_c(const MixtureState& state);

}  // namespace anytime
