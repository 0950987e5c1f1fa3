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

#include <algorithm>
#include <cmath>
#include <limits>

#include "anytime/kernels.hpp"

namespace anytime::kernels {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void accumulate_log_affine(double* acc, const double* stakes, std::size_t n, double z,
                           double weight) {
  for (std::size_t i = 0; i < n; ++i) {
    acc[i] += weight * std::log(1.0 - stakes[i] * z);
  }
}

void log_affine(double* out, const double* zs, std::size_t n, double c) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::log(1.0 - c * zs[i]);
}

double dot_log_affine(const double* w, const double* zs, std::size_t n, double c) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] != 0.0) sum += w[i] * std::log(1.0 - c * zs[i]);
  }
  return sum;
}

double log_sum_exp(const double* a, const double* b, std::size_t n) {
  double peak = kNegInf;
  for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, a[i] + b[i]);
  if (peak == kNegInf) return kNegInf;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::exp(a[i] + b[i] - peak);
  return peak + std::log(sum);
}

void exp_moments(const double* a, const double* b, const double* x, std::size_t n, double shift,
                 double* s0, double* s1) {
  double m0 = 0.0;
  double m1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::exp(a[i] + b[i] - shift);
    m0 += e;
    m1 += x[i] * e;
  }
  *s0 = m0;
  *s1 = m1;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar",   &accumulate_log_affine, &log_affine,
                                 &dot_log_affine, &log_sum_exp,      &exp_moments};
  return table;
}

}  // namespace anytime::kernels
