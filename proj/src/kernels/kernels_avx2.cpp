// AVX2+FMA variants of the hot kernels. Compiled with -mavx2 -mfma when
// the toolchain supports it; kernels_dispatch.cpp decides at runtime
// whether this backend may run.

#include "aucmeta/kernels/kernels.hpp"

#if defined(AUCMETA_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace aucmeta::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// 2^k for integral-valued k in [-1022, 1023], by exponent injection.
inline __m256d pow2i(__m256d k) {
  __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i k64 = _mm256_cvtepi32_epi64(k32);
  k64 = _mm256_add_epi64(k64, _mm256_set1_epi64x(1023));
  return _mm256_castsi256_pd(_mm256_slli_epi64(k64, 52));
}

constexpr double kExpHi = 709.782712893384;
constexpr double kExpLo = -745.133219101941;

// exp for 4 doubles: Cody-Waite reduction, degree-13 Taylor on
// [-ln2/2, ln2/2], two-step 2^k scaling so deep-negative arguments
// degrade through subnormals instead of flushing early.
inline __m256d exp4(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);

  __m256d xc = _mm256_max_pd(_mm256_set1_pd(kExpLo),
                             _mm256_min_pd(_mm256_set1_pd(kExpHi), x));
  __m256d k = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, xc);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);  // 1/13!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  __m256d half = _mm256_set1_pd(0.5);
  __m256d k1 = _mm256_round_pd(_mm256_mul_pd(k, half),
                               _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d k2 = _mm256_sub_pd(k, k1);
  p = _mm256_mul_pd(_mm256_mul_pd(p, pow2i(k1)), pow2i(k2));

  __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  p = _mm256_blendv_pd(p, inf, _mm256_cmp_pd(x, _mm256_set1_pd(kExpHi), _CMP_GT_OQ));
  p = _mm256_blendv_pd(p, _mm256_setzero_pd(),
                       _mm256_cmp_pd(x, _mm256_set1_pd(kExpLo), _CMP_LT_OQ));
  p = _mm256_blendv_pd(p, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
  return p;
}

// log for 4 positive doubles: mantissa/exponent split, atanh series in
// t = (m-1)/(m+1) over m in [sqrt(1/2), sqrt(2)].
inline __m256d log4(__m256d x) {
  const __m256d min_normal = _mm256_set1_pd(2.2250738585072014e-308);
  const __m256d two54 = _mm256_set1_pd(1.8014398509481984e16);

  // Rescale subnormals so the exponent field is usable.
  __m256d sub_mask = _mm256_and_pd(_mm256_cmp_pd(x, min_normal, _CMP_LT_OQ),
                                   _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_GT_OQ));
  __m256d xs = _mm256_blendv_pd(x, _mm256_mul_pd(x, two54), sub_mask);
  __m256d e_bias =
      _mm256_blendv_pd(_mm256_setzero_pd(), _mm256_set1_pd(-54.0), sub_mask);

  __m256i bits = _mm256_castpd_si256(xs);
  __m256i expo = _mm256_and_si256(_mm256_srli_epi64(bits, 52),
                                  _mm256_set1_epi64x(0x7FF));
  // Compact the low 32 bits of each 64-bit lane, then widen to double.
  __m256i packed = _mm256_permutevar8x32_epi32(
      expo, _mm256_setr_epi32(0, 2, 4, 6, 0, 0, 0, 0));
  __m256d e = _mm256_cvtepi32_pd(_mm256_castsi256_si128(packed));
  e = _mm256_add_pd(e, _mm256_set1_pd(-1023.0));
  e = _mm256_add_pd(e, e_bias);

  __m256i mant_bits = _mm256_or_si256(
      _mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
      _mm256_set1_epi64x(0x3FF0000000000000LL));
  __m256d m = _mm256_castsi256_pd(mant_bits);

  const __m256d sqrt2 = _mm256_set1_pd(1.4142135623730951);
  __m256d over = _mm256_cmp_pd(m, sqrt2, _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), over);
  e = _mm256_add_pd(e, _mm256_and_pd(over, _mm256_set1_pd(1.0)));

  __m256d one = _mm256_set1_pd(1.0);
  __m256d t = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  __m256d u = _mm256_mul_pd(t, t);

  __m256d p = _mm256_set1_pd(1.0 / 19.0);
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 17.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 15.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 13.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 11.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 9.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 7.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 5.0));
  p = _mm256_fmadd_pd(p, u, _mm256_set1_pd(1.0 / 3.0));
  p = _mm256_fmadd_pd(p, u, one);
  __m256d log_m = _mm256_mul_pd(_mm256_add_pd(t, t), p);

  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  __m256d out = _mm256_fmadd_pd(e, ln2_lo, log_m);
  out = _mm256_fmadd_pd(e, ln2_hi, out);

  // x <= 0, infinities and NaN.
  __m256d ninf = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  __m256d nan = _mm256_set1_pd(std::numeric_limits<double>::quiet_NaN());
  out = _mm256_blendv_pd(out, nan,
                         _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LT_OQ));
  out = _mm256_blendv_pd(out, ninf,
                         _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_EQ_OQ));
  __m256d pinf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  out = _mm256_blendv_pd(out, pinf, _mm256_cmp_pd(x, pinf, _CMP_EQ_OQ));
  out = _mm256_blendv_pd(out, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
  return out;
}

PoolStats pool_stats_avx2(const double* y, const double* s2, std::size_t n,
                          double tau2, double mu) {
  PoolStats acc;
  const __m256d vtau2 = _mm256_set1_pd(tau2);
  const __m256d vmu = _mm256_set1_pd(mu);
  __m256d sw = _mm256_setzero_pd(), swr = _mm256_setzero_pd();
  __m256d swrr = _mm256_setzero_pd(), sww = _mm256_setzero_pd();
  __m256d slogd = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_add_pd(_mm256_loadu_pd(s2 + i), vtau2);
    __m256d w = _mm256_div_pd(_mm256_set1_pd(1.0), d);
    __m256d r = _mm256_sub_pd(_mm256_loadu_pd(y + i), vmu);
    __m256d rw = _mm256_mul_pd(r, w);
    sw = _mm256_add_pd(sw, w);
    swr = _mm256_add_pd(swr, rw);
    swrr = _mm256_fmadd_pd(r, rw, swrr);
    sww = _mm256_fmadd_pd(w, w, sww);
    slogd = _mm256_add_pd(slogd, log4(d));
  }
  acc.sum_w = hsum(sw);
  acc.sum_wr = hsum(swr);
  acc.sum_wrr = hsum(swrr);
  acc.sum_ww = hsum(sww);
  acc.sum_logd = hsum(slogd);
  for (; i < n; ++i) {
    const double d = s2[i] + tau2;
    const double w = 1.0 / d;
    const double r = y[i] - mu;
    acc.sum_w += w;
    acc.sum_wr += r * w;
    acc.sum_wrr += r * r * w;
    acc.sum_ww += w * w;
    acc.sum_logd += std::log(d);
  }
  return acc;
}

void accumulate_node_terms_avx2(double s2, double r, const double* tau2,
                                std::size_t n, double* acc_w, double* acc_r,
                                double* acc_rr, double* acc_logd) {
  const __m256d vs2 = _mm256_set1_pd(s2);
  const __m256d vr = _mm256_set1_pd(r);
  const __m256d vr2 = _mm256_set1_pd(r * r);
  std::size_t m = 0;
  for (; m + 4 <= n; m += 4) {
    __m256d d = _mm256_add_pd(vs2, _mm256_loadu_pd(tau2 + m));
    __m256d w = _mm256_div_pd(_mm256_set1_pd(1.0), d);
    _mm256_storeu_pd(acc_w + m, _mm256_add_pd(_mm256_loadu_pd(acc_w + m), w));
    _mm256_storeu_pd(acc_r + m,
                     _mm256_fmadd_pd(vr, w, _mm256_loadu_pd(acc_r + m)));
    _mm256_storeu_pd(acc_rr + m,
                     _mm256_fmadd_pd(vr2, w, _mm256_loadu_pd(acc_rr + m)));
    _mm256_storeu_pd(acc_logd + m,
                     _mm256_add_pd(_mm256_loadu_pd(acc_logd + m), log4(d)));
  }
  for (; m < n; ++m) {
    const double d = s2 + tau2[m];
    const double w = 1.0 / d;
    acc_w[m] += w;
    acc_r[m] += r * w;
    acc_rr[m] += r * r * w;
    acc_logd[m] += std::log(d);
  }
}

void vec_exp_avx2(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, exp4(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) {
    double buf[4] = {x[i], 0.0, 0.0, 0.0};
    double res[4];
    _mm256_storeu_pd(res, exp4(_mm256_loadu_pd(buf)));
    out[i] = res[0];
  }
}

void vec_log_avx2(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, log4(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) {
    double buf[4] = {x[i], 1.0, 1.0, 1.0};
    double res[4];
    _mm256_storeu_pd(res, log4(_mm256_loadu_pd(buf)));
    out[i] = res[0];
  }
}

double log_sum_exp_avx2(const double* x, std::size_t n) {
  if (n == 0) return -std::numeric_limits<double>::infinity();
  double hi = x[0];
  std::size_t i = 1;
  if (n >= 5) {
    __m256d vhi = _mm256_loadu_pd(x);
    for (i = 4; i + 4 <= n; i += 4)
      vhi = _mm256_max_pd(vhi, _mm256_loadu_pd(x + i));
    hi = hmax(vhi);
  }
  for (; i < n; ++i) hi = std::max(hi, x[i]);
  if (!std::isfinite(hi)) return hi;

  const __m256d vshift = _mm256_set1_pd(hi);
  __m256d vsum = _mm256_setzero_pd();
  i = 0;
  for (; i + 4 <= n; i += 4)
    vsum = _mm256_add_pd(vsum, exp4(_mm256_sub_pd(_mm256_loadu_pd(x + i), vshift)));
  double sum = hsum(vsum);
  for (; i < n; ++i) sum += std::exp(x[i] - hi);
  return hi + std::log(sum);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d vsum = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    vsum = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), vsum);
  double sum = hsum(vsum);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

const Backend* avx2_backend() {
  static const Backend backend{
      "avx2",        pool_stats_avx2, accumulate_node_terms_avx2,
      vec_exp_avx2,  vec_log_avx2,    log_sum_exp_avx2,
      dot_avx2,
  };
  return &backend;
}

}  // namespace aucmeta::kernels

#else  // !AUCMETA_HAVE_AVX2

namespace aucmeta::kernels {
const Backend* avx2_backend() { return nullptr; }
}  // namespace aucmeta::kernels

#endif
