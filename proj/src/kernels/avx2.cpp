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

#include "anytime/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define ANYTIME_HAVE_AVX2_KERNELS 1
#else
#define ANYTIME_HAVE_AVX2_KERNELS 0
#endif

#if ANYTIME_HAVE_AVX2_KERNELS

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <limits>

namespace anytime::kernels {
namespace {

#define ANYTIME_AVX2 __attribute__((target("avx2,fma")))

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Lane masks for the last partial vector; rows 0..3 enable 0..3 lanes.
alignas(32) constexpr std::int64_t kTailMask[4][4] = {
    {0, 0, 0, 0}, {-1, 0, 0, 0}, {-1, -1, 0, 0}, {-1, -1, -1, 0}};

ANYTIME_AVX2 inline __m256i tail_mask(std::size_t rem) {
  return _mm256_load_si256(reinterpret_cast<const __m256i*>(kTailMask[rem]));
}

// fdlibm __ieee754_log, four lanes. Handles 0 -> -inf, negatives -> NaN,
// +inf -> +inf and subnormal inputs.
ANYTIME_AVX2 inline __m256d log_pd(__m256d x) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();

  const __m256d tiny = _mm256_set1_pd(2.2250738585072014e-308);
  const __m256d is_sub = _mm256_and_pd(_mm256_cmp_pd(x, tiny, _CMP_LT_OQ),
                                       _mm256_cmp_pd(x, zero, _CMP_GT_OQ));
  x = _mm256_blendv_pd(x, _mm256_mul_pd(x, _mm256_set1_pd(18014398509481984.0)), is_sub);
  const __m256d sub_adjust = _mm256_and_pd(is_sub, _mm256_set1_pd(54.0));

  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i exp_bits = _mm256_srli_epi64(bits, 52);
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_bits, magic)),
                            _mm256_set1_pd(4503599627370496.0 + 1023.0));
  e = _mm256_sub_pd(e, sub_adjust);

  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, one));

  const __m256d f = _mm256_sub_pd(m, one);
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(_mm256_set1_pd(2.0), f));
  const __m256d z = _mm256_mul_pd(s, s);
  const __m256d w = _mm256_mul_pd(z, z);
  __m256d t1 = _mm256_fmadd_pd(w, _mm256_set1_pd(1.531383769920937332e-01),
                               _mm256_set1_pd(2.222219843214978396e-01));
  t1 = _mm256_fmadd_pd(w, t1, _mm256_set1_pd(3.999999999940941908e-01));
  t1 = _mm256_mul_pd(w, t1);
  __m256d t2 = _mm256_fmadd_pd(w, _mm256_set1_pd(1.479819860511658591e-01),
                               _mm256_set1_pd(1.818357216161805012e-01));
  t2 = _mm256_fmadd_pd(w, t2, _mm256_set1_pd(2.857142874366239149e-01));
  t2 = _mm256_fmadd_pd(w, t2, _mm256_set1_pd(6.666666666666735130e-01));
  t2 = _mm256_mul_pd(z, t2);
  const __m256d r = _mm256_add_pd(t1, t2);
  const __m256d hfsq = _mm256_mul_pd(_mm256_set1_pd(0.5), _mm256_mul_pd(f, f));

  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  // e*ln2_hi - ((hfsq - (s*(hfsq+R) + e*ln2_lo)) - f)
  const __m256d inner = _mm256_fmadd_pd(s, _mm256_add_pd(hfsq, r), _mm256_mul_pd(e, ln2_lo));
  __m256d result =
      _mm256_sub_pd(_mm256_mul_pd(e, ln2_hi), _mm256_sub_pd(_mm256_sub_pd(hfsq, inner), f));

  const __m256d is_zero = _mm256_cmp_pd(x, zero, _CMP_EQ_OQ);
  result = _mm256_blendv_pd(result, _mm256_set1_pd(kNegInf), is_zero);
  const __m256d is_neg = _mm256_cmp_pd(x, zero, _CMP_LT_OQ);
  result = _mm256_blendv_pd(result, _mm256_set1_pd(std::numeric_limits<double>::quiet_NaN()),
                            is_neg);
  const __m256d is_inf =
      _mm256_cmp_pd(x, _mm256_set1_pd(std::numeric_limits<double>::infinity()), _CMP_EQ_OQ);
  result = _mm256_blendv_pd(result, x, is_inf);
  const __m256d is_nan = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);
  return _mm256_blendv_pd(result, x, is_nan);
}

// fdlibm __ieee754_exp, four lanes. Results below the normal range flush to 0.
ANYTIME_AVX2 inline __m256d exp_pd(__m256d x) {
  const __m256d lo_limit = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo_limit, _CMP_LT_OQ);
  const __m256d xc =
      _mm256_min_pd(_mm256_max_pd(x, lo_limit), _mm256_set1_pd(709.0));

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(xc, _mm256_set1_pd(1.44269504088896338700e+00)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d hi = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.93147180369123816490e-01), xc);
  const __m256d lo = _mm256_mul_pd(k, _mm256_set1_pd(1.90821492927058770002e-10));
  const __m256d r = _mm256_sub_pd(hi, lo);
  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_fmadd_pd(rr, _mm256_set1_pd(4.13813679705723846039e-08),
                              _mm256_set1_pd(-1.65339022054652515390e-06));
  p = _mm256_fmadd_pd(rr, p, _mm256_set1_pd(6.61375632143793436117e-05));
  p = _mm256_fmadd_pd(rr, p, _mm256_set1_pd(-2.77777777770155933842e-03));
  p = _mm256_fmadd_pd(rr, p, _mm256_set1_pd(1.66666666666666019037e-01));
  const __m256d c = _mm256_fnmadd_pd(rr, p, r);
  // y = 1 - ((lo - (r*c)/(2-c)) - hi)
  const __m256d frac =
      _mm256_div_pd(_mm256_mul_pd(r, c), _mm256_sub_pd(_mm256_set1_pd(2.0), c));
  const __m256d y = _mm256_sub_pd(_mm256_set1_pd(1.0),
                                  _mm256_sub_pd(_mm256_sub_pd(lo, frac), hi));

  // 2^k via the exponent field; k is integral and within [-1022, 1023].
  const __m256d shifter = _mm256_set1_pd(6755399441055744.0);
  const __m256i ki = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(k, shifter)),
                                      _mm256_castpd_si256(shifter));
  const __m256i pow_bits =
      _mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52);
  __m256d result = _mm256_mul_pd(y, _mm256_castsi256_pd(pow_bits));
  result = _mm256_blendv_pd(result, _mm256_setzero_pd(), underflow);
  const __m256d is_nan = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);
  return _mm256_blendv_pd(result, x, is_nan);
}

ANYTIME_AVX2 inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

ANYTIME_AVX2 inline double hmax(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  const double a = lanes[0] > lanes[1] ? lanes[0] : lanes[1];
  const double b = lanes[2] > lanes[3] ? lanes[2] : lanes[3];
  return a > b ? a : b;
}

ANYTIME_AVX2 void accumulate_log_affine(double* acc, const double* stakes, std::size_t n,
                                        double z, double weight) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d vz = _mm256_set1_pd(z);
  const __m256d vw = _mm256_set1_pd(weight);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d f = _mm256_fnmadd_pd(_mm256_loadu_pd(stakes + i), vz, one);
    const __m256d sum = _mm256_fmadd_pd(vw, log_pd(f), _mm256_loadu_pd(acc + i));
    _mm256_storeu_pd(acc + i, sum);
  }
  if (i < n) {
    const __m256i mask = tail_mask(n - i);
    const __m256d s = _mm256_maskload_pd(stakes + i, mask);
    const __m256d f = _mm256_fnmadd_pd(s, vz, one);
    const __m256d sum = _mm256_fmadd_pd(vw, log_pd(f), _mm256_maskload_pd(acc + i, mask));
    _mm256_maskstore_pd(acc + i, mask, sum);
  }
}

ANYTIME_AVX2 void log_affine(double* out, const double* zs, std::size_t n, double c) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, log_pd(_mm256_fnmadd_pd(vc, _mm256_loadu_pd(zs + i), one)));
  }
  if (i < n) {
    const __m256i mask = tail_mask(n - i);
    const __m256d f = _mm256_fnmadd_pd(vc, _mm256_maskload_pd(zs + i, mask), one);
    _mm256_maskstore_pd(out + i, mask, log_pd(f));
  }
}

ANYTIME_AVX2 double dot_log_affine(const double* w, const double* zs, std::size_t n, double c) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d vc = _mm256_set1_pd(c);
  __m256d sum = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vw = _mm256_loadu_pd(w + i);
    const __m256d term = _mm256_mul_pd(vw, log_pd(_mm256_fnmadd_pd(vc, _mm256_loadu_pd(zs + i), one)));
    sum = _mm256_add_pd(sum, _mm256_blendv_pd(term, zero, _mm256_cmp_pd(vw, zero, _CMP_EQ_OQ)));
  }
  if (i < n) {
    const __m256i mask = tail_mask(n - i);
    const __m256d vw = _mm256_maskload_pd(w + i, mask);
    const __m256d term =
        _mm256_mul_pd(vw, log_pd(_mm256_fnmadd_pd(vc, _mm256_maskload_pd(zs + i, mask), one)));
    sum = _mm256_add_pd(sum, _mm256_blendv_pd(term, zero, _mm256_cmp_pd(vw, zero, _CMP_EQ_OQ)));
  }
  return hsum(sum);
}

ANYTIME_AVX2 double log_sum_exp(const double* a, const double* b, std::size_t n) {
  const __m256d neg_inf = _mm256_set1_pd(kNegInf);
  __m256d peak = neg_inf;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    peak = _mm256_max_pd(peak, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double top = hmax(peak);
  for (std::size_t j = i; j < n; ++j) top = a[j] + b[j] > top ? a[j] + b[j] : top;
  if (top == kNegInf) return kNegInf;

  const __m256d shift = _mm256_set1_pd(top);
  __m256d sum = _mm256_setzero_pd();
  for (i = 0; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    sum = _mm256_add_pd(sum, exp_pd(_mm256_sub_pd(v, shift)));
  }
  if (i < n) {
    const __m256i mask = tail_mask(n - i);
    const __m256d v = _mm256_add_pd(_mm256_maskload_pd(a + i, mask), _mm256_maskload_pd(b + i, mask));
    // Masked-off lanes load 0; push them to -inf so they contribute nothing.
    const __m256d live = _mm256_castsi256_pd(mask);
    sum = _mm256_add_pd(sum, exp_pd(_mm256_blendv_pd(neg_inf, _mm256_sub_pd(v, shift), live)));
  }
  return top + std::log(hsum(sum));
}

ANYTIME_AVX2 void exp_moments(const double* a, const double* b, const double* x, std::size_t n,
                              double shift, double* s0, double* s1) {
  const __m256d vshift = _mm256_set1_pd(shift);
  const __m256d neg_inf = _mm256_set1_pd(kNegInf);
  __m256d m0 = _mm256_setzero_pd();
  __m256d m1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d e = exp_pd(_mm256_sub_pd(v, vshift));
    m0 = _mm256_add_pd(m0, e);
    m1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), e, m1);
  }
  if (i < n) {
    const __m256i mask = tail_mask(n - i);
    const __m256d v = _mm256_add_pd(_mm256_maskload_pd(a + i, mask), _mm256_maskload_pd(b + i, mask));
    const __m256d live = _mm256_castsi256_pd(mask);
    const __m256d e = exp_pd(_mm256_blendv_pd(neg_inf, _mm256_sub_pd(v, vshift), live));
    m0 = _mm256_add_pd(m0, e);
    m1 = _mm256_fmadd_pd(_mm256_maskload_pd(x + i, mask), e, m1);
  }
  *s0 = hsum(m0);
  *s1 = hsum(m1);
}

#undef ANYTIME_AVX2

}  // namespace

const KernelTable* avx2_table() {
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  if (!supported) return nullptr;
  static const KernelTable table{"avx2",          &accumulate_log_affine, &log_affine,
                                 &dot_log_affine, &log_sum_exp,           &exp_moments};
  return &table;
}

}  // namespace anytime::kernels

#else

namespace anytime::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace anytime::kernels

#endif
