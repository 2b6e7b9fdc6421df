#include <cmath>
#include <numbers>

#include "nilray/distance.hpp"
#include "nilray/geodesic.hpp"
#include "nilray/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define NILRAY_HAVE_AVX2_KERNELS 1
#endif

namespace nilray::kernels {

#ifdef NILRAY_HAVE_AVX2_KERNELS

#define NILRAY_AVX2 __attribute__((target("avx2,fma")))

namespace {

// Cody-Waite split of pi/2 and minimax coefficients for |r| <= pi/4 (Cephes).
constexpr double kPio2_1 = 1.57079625129699707031e+00;
constexpr double kPio2_2 = 7.54978941586159635335e-08;
constexpr double kPio2_3 = 5.39030285815811905290e-15;
constexpr double kSin[6] = {1.58962301576546568060e-10, -2.50507477628578072866e-8,
                            2.75573136213857245213e-6,  -1.98412698295895385996e-4,
                            8.33333333332211858878e-3,  -1.66666666666666307295e-1};
constexpr double kCos[6] = {-1.13585365213876817300e-11, 2.08757008419747316778e-9,
                            -2.75573141792967388112e-7, 2.48015872888517045348e-5,
                            -1.38888888888730564116e-3, 4.16666666666665929218e-2};

NILRAY_AVX2 inline __m256d polevl(__m256d x, const double (&c)[6]) {
  __m256d r = _mm256_set1_pd(c[0]);
  for (int i = 1; i < 6; ++i) r = _mm256_fmadd_pd(r, x, _mm256_set1_pd(c[i]));
  return r;
}

NILRAY_AVX2 inline void sincos4(__m256d x, __m256d& s, __m256d& c) {
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(2.0 / std::numbers::pi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2_1), x);
  r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2_2), r);
  r = _mm256_fnmadd_pd(q, _mm256_set1_pd(kPio2_3), r);

  const __m256d r2 = _mm256_mul_pd(r, r);
  const __m256d sin_r = _mm256_fmadd_pd(_mm256_mul_pd(r, r2), polevl(r2, kSin), r);
  const __m256d cos_r = _mm256_fmadd_pd(_mm256_mul_pd(r2, r2), polevl(r2, kCos),
                                        _mm256_fnmadd_pd(_mm256_set1_pd(0.5), r2, _mm256_set1_pd(1.0)));

  const __m256i n = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(q));
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(n, one), one));
  const __m256d sin_neg = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(n, two), two));
  const __m256d cos_neg = _mm256_castsi256_pd(
      _mm256_cmpeq_epi64(_mm256_and_si256(_mm256_add_epi64(n, one), two), two));
  const __m256d sign = _mm256_set1_pd(-0.0);

  s = _mm256_blendv_pd(sin_r, cos_r, swap);
  c = _mm256_blendv_pd(cos_r, sin_r, swap);
  s = _mm256_xor_pd(s, _mm256_and_pd(sin_neg, sign));
  c = _mm256_xor_pd(c, _mm256_and_pd(cos_neg, sign));
}

// Horner evaluation of u^k * sum coeffs[i] u^(2i), matching series:: in geodesic.hpp.
NILRAY_AVX2 inline __m256d even_series(__m256d u2, const double* coeffs, int n) {
  __m256d r = _mm256_set1_pd(coeffs[n - 1]);
  for (int i = n - 2; i >= 0; --i) r = _mm256_fmadd_pd(r, u2, _mm256_set1_pd(coeffs[i]));
  return r;
}

constexpr double kSincSeries[6] = {1.0, -1.0 / 6, 1.0 / 120, -1.0 / 5040, 1.0 / 362880,
                                   -1.0 / 39916800};
constexpr double kCoscSeries[6] = {1.0 / 2, -1.0 / 24, 1.0 / 720, -1.0 / 40320, 1.0 / 3628800,
                                   -1.0 / 479001600};
constexpr double kDefectSeries[6] = {1.0 / 6, -1.0 / 120, 1.0 / 5040, -1.0 / 362880,
                                     1.0 / 39916800, -1.0 / 6227020800.0};

NILRAY_AVX2 inline __m256d abs4(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

}  // namespace

NILRAY_AVX2 void exp_vector_avx2(const double* w1, const double* w2, const double* w3, double* x,
                                 double* y, double* z, std::size_t n) {
  std::size_t i = 0;
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d crossover = _mm256_set1_pd(series::kCrossover);
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(w1 + i);
    const __m256d b = _mm256_loadu_pd(w2 + i);
    const __m256d u = _mm256_loadu_pd(w3 + i);
    const __m256d u2 = _mm256_mul_pd(u, u);
    const __m256d small = _mm256_cmp_pd(abs4(u), crossover, _CMP_LT_OQ);

    __m256d sh, ch;
    sincos4(_mm256_mul_pd(u, half), sh, ch);
    // Guard the division for lanes that take the series branch anyway.
    const __m256d safe_u = _mm256_blendv_pd(u, _mm256_set1_pd(1.0), small);
    const __m256d sin_u = _mm256_mul_pd(two, _mm256_mul_pd(sh, ch));
    const __m256d inv_u = _mm256_div_pd(_mm256_set1_pd(1.0), safe_u);
    const __m256d sinc_big = _mm256_mul_pd(sin_u, inv_u);
    const __m256d cosc_big = _mm256_mul_pd(_mm256_mul_pd(two, _mm256_mul_pd(sh, sh)), inv_u);
    const __m256d defect_big =
        _mm256_mul_pd(_mm256_sub_pd(safe_u, sin_u), _mm256_mul_pd(inv_u, inv_u));

    const __m256d sinc_small = even_series(u2, kSincSeries, 6);
    const __m256d cosc_small = _mm256_mul_pd(u, even_series(u2, kCoscSeries, 6));
    const __m256d defect_small = _mm256_mul_pd(u, even_series(u2, kDefectSeries, 6));

    const __m256d sn = _mm256_blendv_pd(sinc_big, sinc_small, small);
    const __m256d cs = _mm256_blendv_pd(cosc_big, cosc_small, small);
    const __m256d df = _mm256_blendv_pd(defect_big, defect_small, small);

    const __m256d px = _mm256_fmsub_pd(a, sn, _mm256_mul_pd(b, cs));
    const __m256d py = _mm256_fmadd_pd(a, cs, _mm256_mul_pd(b, sn));
    const __m256d h2 = _mm256_fmadd_pd(a, a, _mm256_mul_pd(b, b));
    const __m256d pz = _mm256_fmadd_pd(_mm256_mul_pd(half, h2), df, u);
    _mm256_storeu_pd(x + i, px);
    _mm256_storeu_pd(y + i, py);
    _mm256_storeu_pd(z + i, pz);
  }
  exp_vector_scalar(w1 + i, w2 + i, w3 + i, x + i, y + i, z + i, n - i);
}

NILRAY_AVX2 void far_field_avx2(const double* x, const double* y, const double* z, double* out,
                                std::size_t n) {
  std::size_t i = 0;
  const __m256d cv = _mm256_set1_pd(kVerticalScale);
  for (; i + 4 <= n; i += 4) {
    const __m256d px = _mm256_loadu_pd(x + i);
    const __m256d py = _mm256_loadu_pd(y + i);
    const __m256d pz = _mm256_loadu_pd(z + i);
    const __m256d rho = _mm256_sqrt_pd(_mm256_fmadd_pd(px, px, _mm256_mul_pd(py, py)));
    const __m256d vert = _mm256_mul_pd(cv, _mm256_sqrt_pd(abs4(pz)));
    _mm256_storeu_pd(out + i, _mm256_max_pd(rho, vert));
  }
  far_field_scalar(x + i, y + i, z + i, out + i, n - i);
}

NILRAY_AVX2 void lower_bound_avx2(const double* x, const double* y, const double* z, double* out,
                                  std::size_t n) {
  constexpr double P = kLowerBoundScale;
  std::size_t i = 0;
  const __m256d vp = _mm256_set1_pd(P);
  const __m256d two_p = _mm256_set1_pd(2.0 * P);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d two = _mm256_set1_pd(2.0);
  for (; i + 4 <= n; i += 4) {
    const __m256d px = _mm256_loadu_pd(x + i);
    const __m256d py = _mm256_loadu_pd(y + i);
    const __m256d pz = _mm256_loadu_pd(z + i);
    const __m256d rho = _mm256_sqrt_pd(_mm256_fmadd_pd(px, px, _mm256_mul_pd(py, py)));
    const __m256d half_rho = _mm256_mul_pd(half, rho);
    const __m256d inner = _mm256_add_pd(_mm256_add_pd(vp, abs4(pz)), half_rho);
    const __m256d root = _mm256_sqrt_pd(_mm256_mul_pd(vp, inner));
    const __m256d g = _mm256_sub_pd(_mm256_fmsub_pd(two, root, two_p), half_rho);
    _mm256_storeu_pd(out + i, _mm256_max_pd(rho, g));
  }
  lower_bound_scalar(x + i, y + i, z + i, out + i, n - i);
}

NILRAY_AVX2 void sincos_avx2(const double* in, double* s, double* c, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vs, vc;
    sincos4(_mm256_loadu_pd(in + i), vs, vc);
    _mm256_storeu_pd(s + i, vs);
    _mm256_storeu_pd(c + i, vc);
  }
  for (; i < n; ++i) {
    s[i] = std::sin(in[i]);
    c[i] = std::cos(in[i]);
  }
}

bool avx2_compiled() { return true; }

#else

void exp_vector_avx2(const double* w1, const double* w2, const double* w3, double* x, double* y,
                     double* z, std::size_t n) {
  exp_vector_scalar(w1, w2, w3, x, y, z, n);
}
void far_field_avx2(const double* x, const double* y, const double* z, double* out,
                    std::size_t n) {
  far_field_scalar(x, y, z, out, n);
}
void lower_bound_avx2(const double* x, const double* y, const double* z, double* out,
                      std::size_t n) {
  lower_bound_scalar(x, y, z, out, n);
}
void sincos_avx2(const double* in, double* s, double* c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = std::sin(in[i]);
    c[i] = std::cos(in[i]);
  }
}
bool avx2_compiled() { return false; }

#endif

}  // namespace nilray::kernels
