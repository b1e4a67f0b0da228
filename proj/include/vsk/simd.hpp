#pragma once

#include <cstddef>

// Runtime-dispatched kernels for the hot inner loops: RBF profile evaluation,
// squared distances against a query point, and the dense products used by the
// network. Two implementations exist (portable scalar, AVX2+FMA); the active
// one is picked once per process from cpuid, overridable with VSK_SIMD=scalar
// or VSK_SIMD=avx2 in the environment, or force_isa() in tests.
//
// Contract: for identical inputs the two implementations agree to ~1e-12
// relative (reductions use different summation trees), and each one is
// individually deterministic. All inputs must be finite.

namespace vsk::simd {

enum class Isa { scalar, avx2 };

Isa active_isa();
void force_isa(Isa isa);
const char* isa_name(Isa isa);
bool cpu_has_avx2();

struct OpsTable {
  // dst = exp(src)
  void (*vexp)(double* dst, const double* src, std::size_t n);
  // dst = exp(-eps^2 * r2)
  void (*gaussian_profile)(double* dst, const double* r2, std::size_t n, double eps);
  // dst = exp(-eps*r) * (1 + eps*r), r = sqrt(r2)
  void (*matern2_profile)(double* dst, const double* r2, std::size_t n, double eps);
  // dst[i] = (xs[i]-qx)^2 + (ys[i]-qy)^2
  void (*sqdist2)(double* dst, const double* xs, const double* ys, std::size_t n,
                  double qx, double qy);
  // dst[i] = (xs[i]-qx)^2 + (ys[i]-qy)^2 + (zs[i]-qz)^2; the first two terms
  // accumulate exactly like sqdist2 so a zero third coordinate adds exactly 0
  void (*sqdist3)(double* dst, const double* xs, const double* ys, const double* zs,
                  std::size_t n, double qx, double qy, double qz);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += a*x
  void (*axpy)(double* y, double a, const double* x, std::size_t n);
  // dst = elu(z) and its derivative (elu(0)=0, elu'(0)=1)
  void (*elu)(double* dst, const double* z, std::size_t n);
  void (*elu_grad)(double* dst, const double* z, std::size_t n);
  // row-major dense products
  // C (m x n) = A (m x k) * B (k x n)
  void (*matmul_nn)(double* C, const double* A, const double* B,
                    std::size_t m, std::size_t k, std::size_t n);
  // C (m x n) = A (m x k) * B (n x k)^T
  void (*matmul_nt)(double* C, const double* A, const double* B,
                    std::size_t m, std::size_t k, std::size_t n);
  // C (k x n) += A (m x k)^T * B (m x n); caller initializes C
  void (*matmul_tn_acc)(double* C, const double* A, const double* B,
                        std::size_t m, std::size_t k, std::size_t n);
  // y (m) = A (m x n) * x (n)
  void (*gemv)(double* y, const double* A, const double* x,
               std::size_t m, std::size_t n);
};

const OpsTable& ops();           // active table
const OpsTable& scalar_ops();    // always the portable implementation
const OpsTable& avx2_ops();      // only valid to call through if cpu_has_avx2()

// Convenience forwarders through the active table.
inline void vexp(double* dst, const double* src, std::size_t n) { ops().vexp(dst, src, n); }
inline void gaussian_profile(double* dst, const double* r2, std::size_t n, double eps) {
  ops().gaussian_profile(dst, r2, n, eps);
}
inline void matern2_profile(double* dst, const double* r2, std::size_t n, double eps) {
  ops().matern2_profile(dst, r2, n, eps);
}
inline void sqdist2(double* dst, const double* xs, const double* ys, std::size_t n,
                    double qx, double qy) {
  ops().sqdist2(dst, xs, ys, n, qx, qy);
}
inline void sqdist3(double* dst, const double* xs, const double* ys, const double* zs,
                    std::size_t n, double qx, double qy, double qz) {
  ops().sqdist3(dst, xs, ys, zs, n, qx, qy, qz);
}
inline double dot(const double* a, const double* b, std::size_t n) { return ops().dot(a, b, n); }
inline void axpy(double* y, double a, const double* x, std::size_t n) { ops().axpy(y, a, x, n); }
inline void elu(double* dst, const double* z, std::size_t n) { ops().elu(dst, z, n); }
inline void elu_grad(double* dst, const double* z, std::size_t n) { ops().elu_grad(dst, z, n); }
inline void matmul_nn(double* C, const double* A, const double* B,
                      std::size_t m, std::size_t k, std::size_t n) {
  ops().matmul_nn(C, A, B, m, k, n);
}
inline void matmul_nt(double* C, const double* A, const double* B,
                      std::size_t m, std::size_t k, std::size_t n) {
  ops().matmul_nt(C, A, B, m, k, n);
}
inline void matmul_tn_acc(double* C, const double* A, const double* B,
                          std::size_t m, std::size_t k, std::size_t n) {
  ops().matmul_tn_acc(C, A, B, m, k, n);
}
inline void gemv(double* y, const double* A, const double* x,
                 std::size_t m, std::size_t n) {
  ops().gemv(y, A, x, m, n);
}

} // namespace vsk::simd
