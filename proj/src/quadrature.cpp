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

#include "anytime/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace anytime {
namespace {

// Reference rule on [-1, 1]. Newton iteration on P_n from the Chebyshev-like
// initial guess; the recurrence is stable for the sizes used here (<= 1024).
QuadratureRule reference_rule(std::size_t n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t j = 2; j <= n; ++j) {
        const double jj = static_cast<double>(j);
        const double p2 = ((2.0 * jj - 1.0) * x * p1 - (jj - 1.0) * p0) / jj;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t j = 2; j <= n; ++j) {
      const double jj = static_cast<double>(j);
      const double p2 = ((2.0 * jj - 1.0) * x * p1 - (jj - 1.0) * p0) / jj;
      p0 = p1;
      p1 = p2;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

const QuadratureRule& cached_reference(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, reference_rule(n)).first;
  return it->second;
}

}  // namespace

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: need at least one node");
  if (n == 1) return QuadratureRule{{0.5 * (a + b)}, {b - a}};
  const QuadratureRule& ref = cached_reference(n);
  QuadratureRule out;
  out.nodes.resize(n);
  out.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < n; ++i) {
    out.nodes[i] = mid + half * ref.nodes[i];
    out.weights[i] = half * ref.weights[i];
  }
  return out;
}

}  // namespace anytime
