#include "vsk/linalg.hpp"

#include <cmath>
#include <string>

#include "vsk/errors.hpp"
#include "vsk/simd.hpp"

namespace vsk {
namespace {

// Row-oriented Cholesky (Crout). Returns false on a non-positive or
// non-finite pivot. Reads only the lower triangle of A.
bool try_cholesky(const Matrix& A, double jitter, Matrix& L) {
  const std::size_t n = A.rows;
  L = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double* li = L.row(i);
    for (std::size_t j = 0; j < i; ++j) {
      const double* lj = L.row(j);
      li[j] = (A(i, j) - simd::dot(li, lj, j)) / lj[j];
    }
    const double d = A(i, i) + jitter - simd::dot(li, li, i);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    li[i] = std::sqrt(d);
  }
  return true;
}

// r = b - A x with long double accumulation; returns ||r||_inf. The solution
// is kept in long double between correction steps so refinement can reach
// residuals at the data scale even when the coefficients are large.
double residual(const Matrix& A, const long double* x, const double* b, double* r) {
  const std::size_t n = A.rows;
  double rmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = A.row(i);
    long double acc = b[i];
    for (std::size_t j = 0; j < n; ++j) acc -= (long double)ai[j] * x[j];
    r[i] = (double)acc;
    const double m = std::fabs(r[i]);
    if (m > rmax) rmax = m;
  }
  return rmax;
}

} // namespace

double norm_inf(const double* v, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::fabs(v[i]) > m) m = std::fabs(v[i]);
  return m;
}

double matrix_norm_inf(const Matrix& A) {
  double m = 0.0;
  for (std::size_t i = 0; i < A.rows; ++i) {
    double s = 0.0;
    const double* ai = A.row(i);
    for (std::size_t j = 0; j < A.cols; ++j) s += std::fabs(ai[j]);
    if (s > m) m = s;
  }
  return m;
}

SpdFactor spd_factor(const Matrix& A) {
  if (A.rows != A.cols) throw argument_error("spd_factor: matrix not square");
  const std::size_t n = A.rows;
  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::fabs(A(i, j) - A(j, i));
      if (d > asym) asym = d;
    }
  if (asym > 1e-12)
    throw argument_error("spd_factor: matrix not symmetric (max asymmetry " +
                         std::to_string(asym) + ")");

  SpdFactor F;
  if (try_cholesky(A, 0.0, F.L)) {
    F.jitter = 0.0;
    return F;
  }
  for (int k = 0; k <= 6; ++k) {
    const double jitter = 1e-12 * std::pow(10.0, k);
    if (try_cholesky(A, jitter, F.L)) {
      F.jitter = jitter;
      return F;
    }
  }
  throw singular_error("spd_factor: Cholesky failed for all jitters up to 1e-6");
}

void factor_solve(const SpdFactor& F, const double* b, double* x) {
  const std::size_t n = F.L.rows;
  // forward: L y = b
  for (std::size_t i = 0; i < n; ++i) {
    const double* li = F.L.row(i);
    x[i] = (b[i] - simd::dot(li, x, i)) / li[i];
  }
  // backward: L^T x = y, peeling off one solved component at a time
  for (std::size_t j = n; j-- > 0;) {
    const double* lj = F.L.row(j);
    x[j] /= lj[j];
    simd::axpy(x, -x[j], lj, j);
  }
}

void factor_solve_cols(const SpdFactor& F, const Matrix& B, Matrix& X) {
  const std::size_t n = F.L.rows;
  const std::size_t m = B.cols;
  X = B;
  for (std::size_t i = 0; i < n; ++i) {
    double* xi = X.row(i);
    const double* li = F.L.row(i);
    for (std::size_t j = 0; j < i; ++j) simd::axpy(xi, -li[j], X.row(j), m);
    const double inv = 1.0 / li[i];
    for (std::size_t c = 0; c < m; ++c) xi[c] *= inv;
  }
  for (std::size_t i = n; i-- > 0;) {
    double* xi = X.row(i);
    for (std::size_t j = i + 1; j < n; ++j) simd::axpy(xi, -F.L(j, i), X.row(j), m);
    const double inv = 1.0 / F.L(i, i);
    for (std::size_t c = 0; c < m; ++c) xi[c] *= inv;
  }
}

std::vector<double> refine_solve(const Matrix& A, const SpdFactor& F, const double* b,
                                 double* residual_inf) {
  const std::size_t n = A.rows;
  std::vector<double> x0(n), r(n), d(n);
  factor_solve(F, b, x0.data());
  std::vector<long double> x(x0.begin(), x0.end());

  // drive the residual to the data scale, not the coefficient scale: fitted
  // surfaces must sit on their samples even when the coefficients are huge
  const double bnorm = norm_inf(b, n);
  const double target = 1e-9 * (1.0 + bnorm);
  std::vector<double> best = x0;
  double best_res = residual(A, x.data(), b, r.data());

  int stalls = 0;
  for (int iter = 0; iter < 30 && best_res > target; ++iter) {
    factor_solve(F, r.data(), d.data());
    for (std::size_t i = 0; i < n; ++i) x[i] += d[i];
    const double res = residual(A, x.data(), b, r.data());
    if (res < best_res) {
      best.assign(x.begin(), x.end());
      best_res = res;
      stalls = 0;
    } else if (++stalls >= 2) {
      break; // two steps without progress: at the attainable floor
    }
  }
  if (residual_inf) *residual_inf = best_res;
  return best;
}

SolveReport spd_solve(const Matrix& A, const std::vector<double>& b) {
  if (A.rows != b.size()) throw argument_error("spd_solve: dimension mismatch");
  const SpdFactor F = spd_factor(A);
  SolveReport rep;
  rep.jitter_used = F.jitter;
  rep.factorization_ok = true;
  rep.solution = refine_solve(A, F, b.data(), &rep.residual_inf);
  return rep;
}

} // namespace vsk
