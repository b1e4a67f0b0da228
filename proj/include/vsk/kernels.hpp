#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vsk/linalg.hpp"

namespace vsk {

enum class KernelFamily { gaussian, matern_c2 };

// phi_eps(r): gaussian exp(-(eps r)^2), matern_c2 exp(-eps r)(1 + eps r)
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  double epsilon = 1.0;
};

const char* kernel_name(KernelFamily family);
KernelFamily kernel_from_name(const std::string& name); // throws argument_error
void validate(const KernelSpec& spec);                  // eps finite and > 0

// point i lives at coords[i*dim .. i*dim+dim)
struct NodeSet {
  std::size_t dim = 0;
  std::vector<double> coords;

  std::size_t size() const { return dim ? coords.size() / dim : 0; }
  const double* point(std::size_t i) const { return coords.data() + i * dim; }
};

// column-major staging for distance kernels; cols[d][i] = coordinate d of point i
struct NodeCols {
  std::vector<std::vector<double>> cols;

  std::size_t dim() const { return cols.size(); }
  std::size_t size() const { return cols.empty() ? 0 : cols[0].size(); }
  static NodeCols from(const NodeSet& nodes);
  void push_col(std::vector<double> col); // throws on length mismatch

  // squared distances from point i of this set to points [0, len)
  void sqdist_to(std::size_t i, double* r2, std::size_t len) const;
  // squared distances from an arbitrary query (q has dim() entries) to all points
  void sqdist_point(const double* q, double* r2) const;
};

struct AugmentedNodeSet {
  NodeSet points;                     // dim = source dim + 1
  std::vector<double> scaling_values; // last coordinate
};

double rbf_eval(const KernelSpec& spec, double r); // r >= 0

// profile over squared distances: out[i] = phi_eps(sqrt(r2[i]))
void rbf_profile(const KernelSpec& spec, const double* r2, double* out, std::size_t n);

// twice the profile's derivative in rho = r^2; this is the factor in
// d phi(|p_i - p_k|^2) / d fbar_i = rbf_dprofile2 * (fbar_i - fbar_k)
// for points augmented with an fbar coordinate.
//   gaussian:  -2 eps^2 exp(-eps^2 rho)
//   matern_c2: -eps^2 exp(-eps sqrt(rho))
void rbf_dprofile2(const KernelSpec& spec, const double* r2, double* out, std::size_t n);

AugmentedNodeSet augment(const NodeSet& nodes, const std::vector<double>& scaling_values);

// symmetric positive-definite interpolation matrix; throws argument_error on
// duplicate points (squared distance below 1e-28)
Matrix gram(const KernelSpec& spec, const NodeSet& nodes);
Matrix gram(const KernelSpec& spec, const NodeCols& cols);

} // namespace vsk
