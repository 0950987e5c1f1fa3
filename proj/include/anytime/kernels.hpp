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
#include <span>
#include <string_view>

// Data-parallel inner loops shared by the mixture, confidence and simulation
// code. Every kernel has a scalar reference implementation; an AVX2/FMA table
// is selected at runtime when the CPU supports it. The two tables agree to a
// few ulp (the vector log/exp are fdlibm-style polynomials, the scalar ones
// call <cmath>), which the equivalence tests pin down.
//
// "Affine log" below always means log(1 - c * z): the log of a betting factor
// with stake c and normalized deviation z.

namespace anytime::kernels {

struct KernelTable {
  std::string_view name;

  // acc[i] += weight * log(1 - stakes[i] * z)
  void (*accumulate_log_affine)(double* acc, const double* stakes, std::size_t n, double z,
                                double weight);
  // out[i] = log(1 - c * zs[i])
  void (*log_affine)(double* out, const double* zs, std::size_t n, double c);
  // sum_i w[i] * log(1 - c * zs[i]); terms with w[i] == 0 are skipped.
  double (*dot_log_affine)(const double* w, const double* zs, std::size_t n, double c);
  // log sum_i exp(a[i] + b[i]); -inf when every term is -inf.
  double (*log_sum_exp)(const double* a, const double* b, std::size_t n);
  // s0 = sum exp(a+b-shift), s1 = sum x * exp(a+b-shift).
  void (*exp_moments)(const double* a, const double* b, const double* x, std::size_t n,
                      double shift, double* s0, double* s1);
};

const KernelTable& scalar_table();
// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

// Chosen once per process: ANYTIME_SIMD=scalar|avx2|auto (default auto).
const KernelTable& active();

// Overrides the process-wide selection (tests, benchmarking). Returns the
// previous table.
const KernelTable& set_active(const KernelTable& table);

// Convenience wrappers over the active table.
inline void accumulate_log_affine(std::span<double> acc, std::span<const double> stakes, double z,
                                  double weight = 1.0) {
  active().accumulate_log_affine(acc.data(), stakes.data(), acc.size(), z, weight);
}
inline double log_sum_exp(std::span<const double> a, std::span<const double> b) {
  return active().log_sum_exp(a.data(), b.data(), a.size());
}

}  // namespace anytime::kernels
