// AVX2 + FMA variants. This file is compiled with -mavx2 -mfma; nothing here
// may run unless dispatch.cpp verified CPU support.

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "qac/simd/kernels.hpp"

namespace qac::simd::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// exp for x in [~-1, 40]: range reduction by ln2 plus degree-12 Taylor on
// the reduced argument; ~1 ulp over the range used by coth below.
inline __m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d c1 = _mm256_set1_pd(0.693145751953125);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);

  __m256d nf = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                               _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(nf, c1, x);
  r = _mm256_fnmadd_pd(nf, c2, r);

  // sum_{k=0..12} r^k / k!
  __m256d p = _mm256_set1_pd(2.08767569878680989792e-9);  // 1/12!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.50521083854417187751e-8));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.75573192239858906526e-7));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.75573192239858906526e-6));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.48015873015873015873e-5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.98412698412698412698e-4));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.38888888888888888889e-3));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(8.33333333333333333333e-3));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(4.16666666666666666667e-2));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.66666666666666666667e-1));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // scale by 2^n through the exponent field
  __m128i n32 = _mm256_cvtpd_epi32(nf);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  __m256i pow2 =
      _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(pow2));
}

double k_sum_rsqrt_shifted(const double* e, std::size_t n, double shift) {
  const __m256d sh = _mm256_set1_pd(shift);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_add_pd(_mm256_loadu_pd(e + i), sh);
    acc = _mm256_add_pd(acc, _mm256_div_pd(one, _mm256_sqrt_pd(v)));
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += 1.0 / std::sqrt(e[i] + shift);
  return hsum(acc) + tail;
}

double k_sum_coth_rsqrt(const double* e, std::size_t n, double shift, double b) {
  const __m256d sh = _mm256_set1_pd(shift);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d bb = _mm256_set1_pd(2.0 * b);
  const __m256d cap = _mm256_set1_pd(38.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_add_pd(_mm256_loadu_pd(e + i), sh);
    __m256d r = _mm256_sqrt_pd(v);
    __m256d y2 = _mm256_mul_pd(bb, r);
    __m256d sat = _mm256_cmp_pd(y2, cap, _CMP_GT_OQ);
    // clamp the saturated lanes so exp stays in range, then overwrite with 1
    __m256d ex = exp_pd(_mm256_min_pd(y2, cap));
    __m256d coth =
        _mm256_add_pd(one, _mm256_div_pd(two, _mm256_sub_pd(ex, one)));
    coth = _mm256_blendv_pd(coth, one, sat);
    acc = _mm256_add_pd(acc, _mm256_div_pd(coth, r));
  }
  double tail = 0.0;
  for (; i < n; ++i) {
    const double r = std::sqrt(e[i] + shift);
    const double y = b * r;
    tail += (y > 19.0 ? 1.0 : 1.0 + 2.0 / (std::exp(2.0 * y) - 1.0)) / r;
  }
  return hsum(acc) + tail;
}

double k_dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i] * y[i];
  return hsum(acc) + tail;
}

double k_sum_sq(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i] * x[i];
  return hsum(acc) + tail;
}

double k_sum_sq_diff_periodic(const double* x, std::size_t n) {
  if (n < 2) return 0.0;
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 5 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i + 1), _mm256_loadu_pd(x + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double tail = 0.0;
  for (; i + 1 < n; ++i) {
    const double d = x[i + 1] - x[i];
    tail += d * d;
  }
  const double d = x[0] - x[n - 1];
  return hsum(acc) + tail + d * d;
}

double k_sum_even_poly(const double* x, std::size_t n, const double* c,
                       std::size_t k, double h) {
  const __m256d hv = _mm256_set1_pd(h);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xv = _mm256_loadu_pd(x + i);
    __m256d t = _mm256_mul_pd(xv, xv);
    __m256d v = _mm256_setzero_pd();
    for (std::size_t s = k; s-- > 0;)
      v = _mm256_fmadd_pd(v, t, _mm256_set1_pd(c[s]));
    acc = _mm256_add_pd(acc, _mm256_fnmadd_pd(hv, xv, _mm256_mul_pd(v, t)));
  }
  double tail = 0.0;
  for (; i < n; ++i) {
    const double t = x[i] * x[i];
    double v = 0.0;
    for (std::size_t s = k; s-- > 0;) v = v * t + c[s];
    tail += v * t - h * x[i];
  }
  return hsum(acc) + tail;
}

}  // namespace

const Kernels avx2_kernels = {
    k_sum_rsqrt_shifted, k_sum_coth_rsqrt,       k_dot,
    k_sum_sq,            k_sum_sq_diff_periodic, k_sum_even_poly,
    "avx2",
};

}  // namespace qac::simd::detail

#endif  // x86
