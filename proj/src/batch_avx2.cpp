// AVX2+FMA variants of the batched kernel evaluators. Compiled with
// -mavx2 -mfma; selected at runtime through batch::active().
#include "calorpot/batch.hpp"
#include "calorpot/kernels.hpp"

#include <immintrin.h>

namespace calorpot::batch {

namespace {

inline __m256d splat(double v) { return _mm256_set1_pd(v); }

// exp(x) for x in [-708, 708]: Cody-Waite reduction, degree-14 Taylor, IEEE
// exponent reassembly.
inline __m256d vexp_pd(__m256d x) {
  const __m256d log2e = splat(1.4426950408889634074);
  const __m256d ln2_hi = splat(6.93145751953125e-1);
  const __m256d ln2_lo = splat(1.42860682030941723212e-6);
  x = _mm256_max_pd(_mm256_min_pd(x, splat(708.0)), splat(-708.0));
  __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  // sum_{k=0}^{14} r^k / k!
  __m256d p = splat(1.0 / 87178291200.0);  // 1/14!
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 6227020800.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, splat(0.5));
  p = _mm256_fmadd_pd(p, r, splat(1.0));
  p = _mm256_fmadd_pd(p, r, splat(1.0));

  __m128i ni = _mm256_cvtpd_epi32(n);
  __m256i nl = _mm256_cvtepi32_epi64(ni);
  __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(nl, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

// erfc(y) for y >= 0 (Cody's rational approximations) together with e^{-y^2}
inline void verfc_exp_pd(__m256d y, __m256d& erfc_out, __m256d& exp_out) {
  const __m256d one = splat(1.0);
  __m256d ex2 = vexp_pd(_mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(), y), y));
  exp_out = ex2;

  // region 1: y <= 0.46875, erfc = 1 - y P1(y^2)/Q1(y^2)
  const double A[5] = {3.16112374387056560e0, 1.13864154151050156e2, 3.77485237685302021e2,
                       3.20937758913846947e3, 1.85777706184603153e-1};
  const double B[4] = {2.36012909523441209e1, 2.44024637934444173e2, 1.28261652607737228e3,
                       2.84423683343917062e3};
  __m256d z = _mm256_mul_pd(y, y);
  __m256d num1 = _mm256_mul_pd(splat(A[4]), z);
  __m256d den1 = z;
  for (int i = 0; i < 3; ++i) {
    num1 = _mm256_mul_pd(_mm256_add_pd(num1, splat(A[i])), z);
    den1 = _mm256_mul_pd(_mm256_add_pd(den1, splat(B[i])), z);
  }
  __m256d erf1 = _mm256_div_pd(_mm256_mul_pd(y, _mm256_add_pd(num1, splat(A[3]))),
                               _mm256_add_pd(den1, splat(B[3])));
  __m256d r1 = _mm256_sub_pd(one, erf1);

  // region 2: 0.46875 < y <= 4, erfc = e^{-y^2} P2(y)/Q2(y)
  const double C[9] = {5.64188496988670089e-1, 8.88314979438837594e0, 6.61191906371416295e1,
                       2.98635138197400131e2,  8.81952221241769090e2, 1.71204761263407058e3,
                       2.05107837782607147e3,  1.23033935479799725e3, 2.15311535474403846e-8};
  const double D[8] = {1.57449261107098347e1, 1.17693950891312499e2, 5.37181101862009858e2,
                       1.62138957456669019e3, 3.29079923573345963e3, 4.36261909014324716e3,
                       3.43936767414372164e3, 1.23033935480374942e3};
  __m256d num2 = _mm256_mul_pd(splat(C[8]), y);
  __m256d den2 = y;
  for (int i = 0; i < 7; ++i) {
    num2 = _mm256_mul_pd(_mm256_add_pd(num2, splat(C[i])), y);
    den2 = _mm256_mul_pd(_mm256_add_pd(den2, splat(D[i])), y);
  }
  __m256d r2 = _mm256_mul_pd(
      ex2, _mm256_div_pd(_mm256_add_pd(num2, splat(C[7])), _mm256_add_pd(den2, splat(D[7]))));

  // region 3: y > 4, erfc = e^{-y^2} (1/sqrt(pi) - z R3(z))/y, z = 1/y^2
  const double P[6] = {3.05326634961232344e-1, 3.60344899949804439e-1, 1.25781726111229246e-1,
                       1.60837851487422766e-2, 6.58749161529837803e-4, 1.63153871373020978e-2};
  const double Q[5] = {2.56852019228982242e0, 1.87295284992346047e0, 5.27905102951428412e-1,
                       6.05183413124413191e-2, 2.33520497626869185e-3};
  const __m256d sqrpi = splat(5.6418958354775628695e-1);
  __m256d ysafe = _mm256_max_pd(y, splat(0.5));  // avoid 1/0 in unused lanes
  __m256d zi = _mm256_div_pd(one, _mm256_mul_pd(ysafe, ysafe));
  __m256d num3 = _mm256_mul_pd(splat(P[5]), zi);
  __m256d den3 = zi;
  for (int i = 0; i < 4; ++i) {
    num3 = _mm256_mul_pd(_mm256_add_pd(num3, splat(P[i])), zi);
    den3 = _mm256_mul_pd(_mm256_add_pd(den3, splat(Q[i])), zi);
  }
  __m256d r3pre = _mm256_mul_pd(
      zi, _mm256_div_pd(_mm256_add_pd(num3, splat(P[4])), _mm256_add_pd(den3, splat(Q[4]))));
  __m256d r3 = _mm256_div_pd(_mm256_mul_pd(ex2, _mm256_sub_pd(sqrpi, r3pre)), ysafe);

  __m256d m1 = _mm256_cmp_pd(y, splat(0.46875), _CMP_LE_OQ);
  __m256d m3 = _mm256_cmp_pd(y, splat(4.0), _CMP_GT_OQ);
  __m256d res = _mm256_blendv_pd(r2, r3, m3);
  res = _mm256_blendv_pd(res, r1, m1);
  // underflow cutoff
  res = _mm256_andnot_pd(_mm256_cmp_pd(y, splat(26.5), _CMP_GT_OQ), res);
  erfc_out = res;
}

constexpr double kInv4Pi = 1.0 / kFourPi;
constexpr double kHalfIntC = 2.0 / (kFourPi * 3.5449077018110320546);  // 2 (4pi)^{-3/2}

void slp_cumulative_avx2(const double* q, const double* inv_sd, int n, double t, double* out) {
  if (t <= 0.0) {
    for (int j = 0; j < n; ++j) out[j] = 0.0;
    return;
  }
  const double beta = 0.5 / std::sqrt(t);
  int j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d qv = _mm256_loadu_pd(q + j);
    __m256d sq = _mm256_sqrt_pd(qv);
    __m256d w = _mm256_mul_pd(sq, splat(beta));
    __m256d efc, ex2;
    verfc_exp_pd(w, efc, ex2);
    __m256d val = _mm256_div_pd(_mm256_mul_pd(efc, _mm256_loadu_pd(inv_sd + j)),
                                _mm256_mul_pd(splat(kFourPi), sq));
    _mm256_storeu_pd(out + j, val);
  }
  for (; j < n; ++j) out[j] = kernels::cumulative::slp(q[j], inv_sd[j], t);
}

void dlp_radial_avx2(const double* q, const double* inv_sd, int n, double t, double* out) {
  if (t <= 0.0) {
    for (int j = 0; j < n; ++j) out[j] = 0.0;
    return;
  }
  const double beta = 0.5 / std::sqrt(t);
  const __m256d c2 = splat(2.0 * kInvSqrtPi);
  int j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d qv = _mm256_loadu_pd(q + j);
    __m256d sq = _mm256_sqrt_pd(qv);
    __m256d w = _mm256_mul_pd(sq, splat(beta));
    __m256d efc, ex2;
    verfc_exp_pd(w, efc, ex2);
    __m256d bracket = _mm256_fmadd_pd(_mm256_mul_pd(c2, w), ex2, efc);
    __m256d denom = _mm256_mul_pd(splat(kFourPi), _mm256_mul_pd(qv, sq));
    __m256d val =
        _mm256_div_pd(_mm256_mul_pd(bracket, _mm256_loadu_pd(inv_sd + j)), denom);
    _mm256_storeu_pd(out + j, val);
  }
  for (; j < n; ++j) out[j] = kernels::cumulative::dlp_radial(q[j], inv_sd[j], t);
}

void half_integral_avx2(const double* q, const double* inv_sd, int n, double t, double* out) {
  if (t <= 0.0) {
    for (int j = 0; j < n; ++j) out[j] = 0.0;
    return;
  }
  const double inv4t = -0.25 / t;
  const double pref = kHalfIntC / std::sqrt(t);
  int j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d qv = _mm256_loadu_pd(q + j);
    __m256d ex = vexp_pd(_mm256_mul_pd(qv, splat(inv4t)));
    __m256d val = _mm256_div_pd(
        _mm256_mul_pd(_mm256_mul_pd(splat(pref), _mm256_loadu_pd(inv_sd + j)), ex),
        _mm256_sqrt_pd(qv));
    _mm256_storeu_pd(out + j, val);
  }
  for (; j < n; ++j) out[j] = kernels::cumulative::half_integral(q[j], inv_sd[j], t);
}

void gamma_values_avx2(const double* q, const double* inv_sd, int n, double t, double* out) {
  if (t <= 0.0) {
    for (int j = 0; j < n; ++j) out[j] = 0.0;
    return;
  }
  const double inv4t = -0.25 / t;
  const double pref = std::pow(kFourPi * t, -1.5);
  int j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d ex = vexp_pd(_mm256_mul_pd(_mm256_loadu_pd(q + j), splat(inv4t)));
    __m256d val = _mm256_mul_pd(_mm256_mul_pd(splat(pref), _mm256_loadu_pd(inv_sd + j)), ex);
    _mm256_storeu_pd(out + j, val);
  }
  for (; j < n; ++j) out[j] = kernels::cumulative::gamma_value(q[j], inv_sd[j], t);
}

void pair_q_iso_avx2(const double* qx, const double* qy, const double* qz, const double* inv_a,
                     int n, double x, double y, double z, double* q_out) {
  __m256d xv = splat(x), yv = splat(y), zv = splat(z);
  int j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d dx = _mm256_sub_pd(xv, _mm256_loadu_pd(qx + j));
    __m256d dy = _mm256_sub_pd(yv, _mm256_loadu_pd(qy + j));
    __m256d dz = _mm256_sub_pd(zv, _mm256_loadu_pd(qz + j));
    __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dz, dz)));
    _mm256_storeu_pd(q_out + j, _mm256_mul_pd(r2, _mm256_loadu_pd(inv_a + j)));
  }
  for (; j < n; ++j) {
    double dx = x - qx[j], dy = y - qy[j], dz = z - qz[j];
    q_out[j] = (dx * dx + dy * dy + dz * dz) * inv_a[j];
  }
}

void vexp_avx2(const double* x, int n, double* out) {
  int j = 0;
  for (; j + 4 <= n; j += 4) _mm256_storeu_pd(out + j, vexp_pd(_mm256_loadu_pd(x + j)));
  for (; j < n; ++j) out[j] = std::exp(x[j]);
}

void verfc_avx2(const double* x, int n, double* out) {
  int j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d efc, ex2;
    verfc_exp_pd(_mm256_loadu_pd(x + j), efc, ex2);
    _mm256_storeu_pd(out + j, efc);
  }
  for (; j < n; ++j) out[j] = std::erfc(x[j]);
}

}  // namespace

const Kernels& avx2_kernels() {
  static const Kernels k = {slp_cumulative_avx2, dlp_radial_avx2, half_integral_avx2,
                            gamma_values_avx2,   pair_q_iso_avx2, vexp_avx2,
                            verfc_avx2};
  return k;
}

}  // namespace calorpot::batch
