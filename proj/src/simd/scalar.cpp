#include "vsk/simd.hpp"

#include <cmath>

// Portable reference implementations. Plain arithmetic, fixed left-to-right
// accumulation; the AVX2 variants are checked against these in tests.

namespace vsk::simd {
namespace {

void s_vexp(double* dst, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::exp(src[i]);
}

void s_gaussian_profile(double* dst, const double* r2, std::size_t n, double eps) {
  const double neg_eps2 = -(eps * eps);
  for (std::size_t i = 0; i < n; ++i) dst[i] = std::exp(neg_eps2 * r2[i]);
}

void s_matern2_profile(double* dst, const double* r2, std::size_t n, double eps) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = eps * std::sqrt(r2[i]);
    dst[i] = std::exp(-t) * (1.0 + t);
  }
}

void s_sqdist2(double* dst, const double* xs, const double* ys, std::size_t n,
               double qx, double qy) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    dst[i] = dx * dx + dy * dy;
  }
}

void s_sqdist3(double* dst, const double* xs, const double* ys, const double* zs,
               std::size_t n, double qx, double qy, double qz) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    const double dz = zs[i] - qz;
    dst[i] = dx * dx + dy * dy + dz * dz;
  }
}

double s_dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void s_axpy(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void s_elu(double* dst, const double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = z[i] >= 0.0 ? z[i] : std::exp(z[i]) - 1.0;
}

void s_elu_grad(double* dst, const double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = z[i] >= 0.0 ? 1.0 : std::exp(z[i]);
}

void s_matmul_nn(double* C, const double* A, const double* B,
                 std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = A + i * k;
    double* c = C + i * n;
    for (std::size_t j = 0; j < n; ++j) c[j] = 0.0;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double av = a[kk];
      const double* b = B + kk * n;
      for (std::size_t j = 0; j < n; ++j) c[j] += av * b[j];
    }
  }
}

void s_matmul_nt(double* C, const double* A, const double* B,
                 std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      C[i * n + j] = s_dot(A + i * k, B + j * k, k);
}

void s_matmul_tn_acc(double* C, const double* A, const double* B,
                     std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t b = 0; b < m; ++b) {
    const double* arow = A + b * k;
    const double* brow = B + b * n;
    for (std::size_t i = 0; i < k; ++i) s_axpy(C + i * n, arow[i], brow, n);
  }
}

void s_gemv(double* y, const double* A, const double* x, std::size_t m, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) y[i] = s_dot(A + i * n, x, n);
}

} // namespace

const OpsTable& scalar_ops() {
  static const OpsTable t = {
      s_vexp,   s_gaussian_profile, s_matern2_profile, s_sqdist2,   s_sqdist3,
      s_dot,    s_axpy,             s_elu,             s_elu_grad,  s_matmul_nn,
      s_matmul_nt, s_matmul_tn_acc, s_gemv,
  };
  return t;
}

} // namespace vsk::simd
