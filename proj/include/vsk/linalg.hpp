#pragma once

#include <cstddef>
#include <vector>

namespace vsk {

// Dense row-major matrix. Plain storage, no ownership tricks.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double* row(std::size_t i) { return a.data() + i * cols; }
  const double* row(std::size_t i) const { return a.data() + i * cols; }
  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  bool operator==(const Matrix& o) const = default;
};

// Lower-triangular Cholesky factor of A + jitter*I.
struct SpdFactor {
  Matrix L;            // strictly the lower triangle is meaningful
  double jitter = 0.0; // 0 if plain Cholesky succeeded
};

struct SolveReport {
  std::vector<double> solution;
  double jitter_used = 0.0;
  bool factorization_ok = false;
  double residual_inf = 0.0; // ||Ax - b||_inf of the returned solution
};

// Factor A (symmetric positive definite, row-major) as L L^T. If a pivot
// fails, retries with diagonal jitter escalating 1e-12, 1e-11, ..., 1e-6.
// Throws vsk::singular_error when the ladder is exhausted and
// vsk::argument_error when A is not symmetric (asymmetry > 1e-12) or not square.
SpdFactor spd_factor(const Matrix& A);

// Triangular solves against an existing factor (no refinement).
void factor_solve(const SpdFactor& F, const double* b, double* x);
// Multi-RHS variant: B and X are n x m with one right-hand side per column.
void factor_solve_cols(const SpdFactor& F, const Matrix& B, Matrix& X);

// Solve A x = b with the factor plus iterative refinement (residuals
// accumulated in long double) until ||Ax-b||_inf stops improving or meets
// 1e-10 * (||A||_inf ||x||_inf + ||b||_inf). Returns the refined solution
// and its final residual.
std::vector<double> refine_solve(const Matrix& A, const SpdFactor& F, const double* b,
                                 double* residual_inf = nullptr);

// One-shot convenience: factor + refine. Residual contract:
// ||Ax - b||_inf <= 1e-8 * (||A||_inf ||x||_inf + ||b||_inf) on reasonable
// inputs; the achieved residual is reported.
SolveReport spd_solve(const Matrix& A, const std::vector<double>& b);

double norm_inf(const double* v, std::size_t n);
double matrix_norm_inf(const Matrix& A); // max absolute row sum

} // namespace vsk
