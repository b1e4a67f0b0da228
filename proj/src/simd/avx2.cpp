#include "vsk/simd.hpp"

#include <immintrin.h>

#include <cmath>
#include <cstddef>
#include <cstring>
#include <limits>

// AVX2+FMA implementations. This file is the only one compiled with -mavx2;
// it is reached through the dispatch table after a cpuid check.

namespace vsk::simd {
namespace {

// Vectorized exp, Cephes-style. Reduce x = n*ln2 + r with |r| <= ln2/2,
// evaluate the Pade form e^r = 1 + 2r*P(r^2)/(Q(r^2) - r*P(r^2)), then scale
// by 2^n in two exact power-of-two multiplies so the full double range
// (including gradual underflow) survives the exponent arithmetic. ~2 ulp.
// Finite inputs only.
inline __m256d exp4(__m256d x) {
  const __m256d log2e  = _mm256_set1_pd(1.44269504088896340736);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  const __m256d r2 = _mm256_mul_pd(r, r);
  __m256d px = _mm256_fmadd_pd(p0, r2, p1);
  px = _mm256_fmadd_pd(px, r2, p2);
  px = _mm256_mul_pd(px, r);
  __m256d qx = _mm256_fmadd_pd(q0, r2, q1);
  qx = _mm256_fmadd_pd(qx, r2, q2);
  qx = _mm256_fmadd_pd(qx, r2, q3);
  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  // 2^n with n split as n1 + n2, each half within exponent range
  const __m128i ni = _mm256_cvtpd_epi32(n);
  const __m128i n1 = _mm_srai_epi32(ni, 1);
  const __m128i n2 = _mm_sub_epi32(ni, n1);
  const __m128i bias = _mm_set1_epi32(1023);
  const __m256i s1 = _mm256_slli_epi64(_mm256_cvtepi32_epi64(_mm_add_epi32(n1, bias)), 52);
  const __m256i s2 = _mm256_slli_epi64(_mm256_cvtepi32_epi64(_mm_add_epi32(n2, bias)), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(s1));
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(s2));

  // saturate where the exponent split above would wrap
  const __m256d lo = _mm256_set1_pd(-745.2);
  const __m256d hi = _mm256_set1_pd(709.782712893384);
  e = _mm256_blendv_pd(e, _mm256_setzero_pd(), _mm256_cmp_pd(x, lo, _CMP_LT_OQ));
  e = _mm256_blendv_pd(e, _mm256_set1_pd(std::numeric_limits<double>::infinity()),
                       _mm256_cmp_pd(x, hi, _CMP_GT_OQ));
  return e;
}

// Unary ops run their tail through the same vector code on a padded buffer,
// so every element sees the identical instruction sequence regardless of n.

void a_vexp(double* dst, const double* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(dst + i, exp4(_mm256_loadu_pd(src + i)));
  if (i < n) {
    double in[4] = {0, 0, 0, 0}, out[4];
    std::memcpy(in, src + i, (n - i) * sizeof(double));
    _mm256_storeu_pd(out, exp4(_mm256_loadu_pd(in)));
    std::memcpy(dst + i, out, (n - i) * sizeof(double));
  }
}

void a_gaussian_profile(double* dst, const double* r2, std::size_t n, double eps) {
  const __m256d c = _mm256_set1_pd(-(eps * eps));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, exp4(_mm256_mul_pd(c, _mm256_loadu_pd(r2 + i))));
  if (i < n) {
    double in[4] = {0, 0, 0, 0}, out[4];
    std::memcpy(in, r2 + i, (n - i) * sizeof(double));
    _mm256_storeu_pd(out, exp4(_mm256_mul_pd(c, _mm256_loadu_pd(in))));
    std::memcpy(dst + i, out, (n - i) * sizeof(double));
  }
}

inline __m256d matern2_4(__m256d r2, __m256d epsv) {
  const __m256d t = _mm256_mul_pd(epsv, _mm256_sqrt_pd(r2));
  const __m256d e = exp4(_mm256_sub_pd(_mm256_setzero_pd(), t));
  return _mm256_fmadd_pd(e, t, e); // e*(1+t)
}

void a_matern2_profile(double* dst, const double* r2, std::size_t n, double eps) {
  const __m256d epsv = _mm256_set1_pd(eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, matern2_4(_mm256_loadu_pd(r2 + i), epsv));
  if (i < n) {
    double in[4] = {0, 0, 0, 0}, out[4];
    std::memcpy(in, r2 + i, (n - i) * sizeof(double));
    _mm256_storeu_pd(out, matern2_4(_mm256_loadu_pd(in), epsv));
    std::memcpy(dst + i, out, (n - i) * sizeof(double));
  }
}

void a_sqdist2(double* dst, const double* xs, const double* ys, std::size_t n,
               double qx, double qy) {
  const __m256d qxv = _mm256_set1_pd(qx), qyv = _mm256_set1_pd(qy);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), qxv);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), qyv);
    _mm256_storeu_pd(dst + i, _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dx, dx)));
  }
  if (i < n) {
    double bx[4] = {qx, qx, qx, qx}, by[4] = {qy, qy, qy, qy}, out[4];
    std::memcpy(bx, xs + i, (n - i) * sizeof(double));
    std::memcpy(by, ys + i, (n - i) * sizeof(double));
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(bx), qxv);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(by), qyv);
    _mm256_storeu_pd(out, _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dx, dx)));
    std::memcpy(dst + i, out, (n - i) * sizeof(double));
  }
}

void a_sqdist3(double* dst, const double* xs, const double* ys, const double* zs,
               std::size_t n, double qx, double qy, double qz) {
  const __m256d qxv = _mm256_set1_pd(qx), qyv = _mm256_set1_pd(qy), qzv = _mm256_set1_pd(qz);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), qxv);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), qyv);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(zs + i), qzv);
    __m256d t = _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dx, dx));
    _mm256_storeu_pd(dst + i, _mm256_fmadd_pd(dz, dz, t));
  }
  if (i < n) {
    double bx[4] = {qx, qx, qx, qx}, by[4] = {qy, qy, qy, qy}, bz[4] = {qz, qz, qz, qz};
    double out[4];
    std::memcpy(bx, xs + i, (n - i) * sizeof(double));
    std::memcpy(by, ys + i, (n - i) * sizeof(double));
    std::memcpy(bz, zs + i, (n - i) * sizeof(double));
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(bx), qxv);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(by), qyv);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(bz), qzv);
    __m256d t = _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dx, dx));
    _mm256_storeu_pd(out, _mm256_fmadd_pd(dz, dz, t));
    std::memcpy(dst + i, out, (n - i) * sizeof(double));
  }
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double a_dot(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = s0, s2 = s0, s3 = s0;
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), s2);
    s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), s3);
  }
  for (; i + 4 <= n; i += 4)
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  double r = hsum(_mm256_add_pd(_mm256_add_pd(s0, s1), _mm256_add_pd(s2, s3)));
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

void a_axpy(double* y, double a, const double* x, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4,
                     _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
    _mm256_storeu_pd(y + i + 8,
                     _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8)));
    _mm256_storeu_pd(
        y + i + 12, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12)));
  }
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void a_elu(double* dst, const double* z, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd(), one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d zv = _mm256_loadu_pd(z + i);
    const __m256d neg = _mm256_sub_pd(exp4(zv), one);
    _mm256_storeu_pd(dst + i, _mm256_blendv_pd(neg, zv, _mm256_cmp_pd(zv, zero, _CMP_GE_OQ)));
  }
  if (i < n) {
    double in[4] = {0, 0, 0, 0}, out[4];
    std::memcpy(in, z + i, (n - i) * sizeof(double));
    const __m256d zv = _mm256_loadu_pd(in);
    const __m256d neg = _mm256_sub_pd(exp4(zv), one);
    _mm256_storeu_pd(out, _mm256_blendv_pd(neg, zv, _mm256_cmp_pd(zv, zero, _CMP_GE_OQ)));
    std::memcpy(dst + i, out, (n - i) * sizeof(double));
  }
}

void a_elu_grad(double* dst, const double* z, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd(), one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d zv = _mm256_loadu_pd(z + i);
    _mm256_storeu_pd(dst + i,
                     _mm256_blendv_pd(exp4(zv), one, _mm256_cmp_pd(zv, zero, _CMP_GE_OQ)));
  }
  if (i < n) {
    double in[4] = {0, 0, 0, 0}, out[4];
    std::memcpy(in, z + i, (n - i) * sizeof(double));
    const __m256d zv = _mm256_loadu_pd(in);
    _mm256_storeu_pd(out, _mm256_blendv_pd(exp4(zv), one, _mm256_cmp_pd(zv, zero, _CMP_GE_OQ)));
    std::memcpy(dst + i, out, (n - i) * sizeof(double));
  }
}

void a_matmul_nn(double* C, const double* A, const double* B,
                 std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = A + i * k;
    double* c = C + i * n;
    std::size_t j = 0;
    for (; j + 16 <= n; j += 16) {
      __m256d c0 = _mm256_setzero_pd(), c1 = c0, c2 = c0, c3 = c0;
      const double* b = B + j;
      for (std::size_t kk = 0; kk < k; ++kk, b += n) {
        const __m256d av = _mm256_set1_pd(a[kk]);
        c0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b), c0);
        c1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b + 4), c1);
        c2 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b + 8), c2);
        c3 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b + 12), c3);
      }
      _mm256_storeu_pd(c + j, c0);
      _mm256_storeu_pd(c + j + 4, c1);
      _mm256_storeu_pd(c + j + 8, c2);
      _mm256_storeu_pd(c + j + 12, c3);
    }
    for (; j + 4 <= n; j += 4) {
      __m256d c0 = _mm256_setzero_pd();
      const double* b = B + j;
      for (std::size_t kk = 0; kk < k; ++kk, b += n)
        c0 = _mm256_fmadd_pd(_mm256_set1_pd(a[kk]), _mm256_loadu_pd(b), c0);
      _mm256_storeu_pd(c + j, c0);
    }
    for (; j < n; ++j) {
      double s = 0.0;
      for (std::size_t kk = 0; kk < k; ++kk) s += a[kk] * B[kk * n + j];
      c[j] = s;
    }
  }
}

void a_matmul_nt(double* C, const double* A, const double* B,
                 std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) C[i * n + j] = a_dot(A + i * k, B + j * k, k);
}

void a_matmul_tn_acc(double* C, const double* A, const double* B,
                     std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t b = 0; b < m; ++b) {
    const double* arow = A + b * k;
    const double* brow = B + b * n;
    for (std::size_t i = 0; i < k; ++i) a_axpy(C + i * n, arow[i], brow, n);
  }
}

void a_gemv(double* y, const double* A, const double* x, std::size_t m, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) y[i] = a_dot(A + i * n, x, n);
}

} // namespace

const OpsTable& avx2_ops() {
  static const OpsTable t = {
      a_vexp,   a_gaussian_profile, a_matern2_profile, a_sqdist2,   a_sqdist3,
      a_dot,    a_axpy,             a_elu,             a_elu_grad,  a_matmul_nn,
      a_matmul_nt, a_matmul_tn_acc, a_gemv,
  };
  return t;
}

} // namespace vsk::simd
