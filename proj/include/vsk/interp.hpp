#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "vsk/data.hpp"
#include "vsk/deltann.hpp"
#include "vsk/kernels.hpp"
#include "vsk/linalg.hpp"

namespace vsk {

// piecewise-constant scaling: each query takes the value of the nearest
// table point (ties -> lowest index)
struct TabulatedScaling {
  NodeSet points; // dim 2
  std::vector<double> values;

  double operator()(double x1, double x2) const;
};

// the scaling function fbar: absent (plain kernel), a constant, a trained
// network, or a lookup table
struct ScalingFunction {
  struct None {};
  struct Constant {
    double value = 0.0;
  };
  struct Network {
    std::shared_ptr<const NetworkParams> params;
  };
  std::variant<None, Constant, Network, TabulatedScaling> fn;

  bool is_none() const { return std::holds_alternative<None>(fn); }

  static ScalingFunction none() { return {None{}}; }
  static ScalingFunction constant(double v) { return {Constant{v}}; }
  static ScalingFunction network(std::shared_ptr<const NetworkParams> p);
  static ScalingFunction tabulated(TabulatedScaling t) { return {std::move(t)}; }
};

// batched scaling evaluation (networks run batched, in blocks)
std::vector<double> eval_scaling(const ScalingFunction& s, const NodeSet& pts);

// everything fit() computed that later queries reuse: the (augmented) node
// columns, the gram matrix, and its factorization
struct FitCache {
  NodeCols nodes;                 // dim+1 columns when scaled
  Matrix gram;
  SpdFactor factor;
  std::vector<double> node_scaling; // fbar at the nodes (empty when none)
};

struct Interpolant {
  KernelSpec kernel;
  NodeSet centers;
  ScalingFunction scaling;
  std::vector<double> coefficients;
  std::vector<double> values;    // fitted data values
  double jitter = 0.0;
  double node_residual = 0.0;    // ||K c - f||_inf after refinement
  std::shared_ptr<const FitCache> cache;
};

Interpolant fit(const ScatteredData& data, const KernelSpec& kernel,
                const ScalingFunction& scaling);

std::vector<double> evaluate(const Interpolant& itp, const NodeSet& pts);
double evaluate_one(const Interpolant& itp, double x1, double x2);

// cardinal basis at x: solve K phi = kappa(x) (refined)
std::vector<double> cardinal_values(const Interpolant& itp, const double* x);

struct LebesgueProfile {
  NodeSet eval_points;
  std::vector<double> lambda_values;
  double lambda_sup = 0.0; // max over eval_points (a lower estimate of the sup)
};

LebesgueProfile lebesgue_profile(const Interpolant& itp, const NodeSet& pts);

struct BoundRecord {
  double lhs = 0.0; // |f - P_f|
  double rhs = 0.0; // |f - P_fbar| + max_node |f - fbar| * lambda
  bool holds = false;
};

// pointwise check of the error bound through the scaled cardinal functions
std::vector<BoundRecord> bound_check(const ScatteredData& data, const KernelSpec& kernel,
                                     const ScalingFunction& scaling,
                                     const std::vector<double>& f_true, const NodeSet& pts);

// v' K^{-1} v in the kernel's native space on the fitted centers
double native_norm_sq(const Interpolant& itp, const std::vector<double>& v);

// rows x1,x2,value (2d points only)
void write_grid_csv(const std::string& path, const NodeSet& pts,
                    const std::vector<double>& values, int digits = 9);

} // namespace vsk
