#include "vsk/kernels.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "vsk/errors.hpp"
#include "vsk/simd.hpp"

namespace vsk {

namespace {

constexpr double k_dup_r2 = 1e-28; // squared distance below this = duplicate node

void check_r2_unique(const double* r2, std::size_t len, std::size_t i) {
  for (std::size_t k = 0; k < len; ++k) {
    if (r2[k] < k_dup_r2)
      throw argument_error("duplicate nodes " + std::to_string(k) + " and " +
                           std::to_string(i) + " (squared distance < 1e-28)");
  }
}

} // namespace

const char* kernel_name(KernelFamily family) {
  return family == KernelFamily::gaussian ? "gaussian" : "matern2";
}

KernelFamily kernel_from_name(const std::string& name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "matern2") return KernelFamily::matern_c2;
  throw argument_error("unknown kernel '" + name + "' (expected gaussian or matern2)");
}

void validate(const KernelSpec& spec) {
  if (!(spec.epsilon > 0.0) || !std::isfinite(spec.epsilon))
    throw argument_error("kernel shape parameter must be finite and > 0");
}

NodeCols NodeCols::from(const NodeSet& nodes) {
  if (nodes.dim == 0) throw argument_error("node set has dimension 0");
  if (nodes.coords.size() % nodes.dim != 0)
    throw argument_error("node coordinate buffer is not a multiple of dim");
  NodeCols out;
  const std::size_t n = nodes.size();
  out.cols.assign(nodes.dim, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < nodes.dim; ++d) out.cols[d][i] = nodes.coords[i * nodes.dim + d];
  return out;
}

void NodeCols::push_col(std::vector<double> col) {
  if (!cols.empty() && col.size() != cols[0].size())
    throw argument_error("scaling column length does not match node count");
  cols.push_back(std::move(col));
}

void NodeCols::sqdist_to(std::size_t i, double* r2, std::size_t len) const {
  const std::size_t d = dim();
  if (d == 2) {
    simd::sqdist2(r2, cols[0].data(), cols[1].data(), len, cols[0][i], cols[1][i]);
  } else if (d == 3) {
    simd::sqdist3(r2, cols[0].data(), cols[1].data(), cols[2].data(), len, cols[0][i],
                  cols[1][i], cols[2][i]);
  } else {
    for (std::size_t k = 0; k < len; ++k) {
      double acc = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double dx = cols[c][k] - cols[c][i];
        acc += dx * dx;
      }
      r2[k] = acc;
    }
  }
}

void NodeCols::sqdist_point(const double* q, double* r2) const {
  const std::size_t d = dim();
  const std::size_t n = size();
  if (d == 2) {
    simd::sqdist2(r2, cols[0].data(), cols[1].data(), n, q[0], q[1]);
  } else if (d == 3) {
    simd::sqdist3(r2, cols[0].data(), cols[1].data(), cols[2].data(), n, q[0], q[1], q[2]);
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double dx = cols[c][k] - q[c];
        acc += dx * dx;
      }
      r2[k] = acc;
    }
  }
}

double rbf_eval(const KernelSpec& spec, double r) {
  validate(spec);
  if (!(r >= 0.0)) throw argument_error("kernel radius must be >= 0");
  double r2 = r * r;
  double out;
  rbf_profile(spec, &r2, &out, 1);
  return out;
}

void rbf_profile(const KernelSpec& spec, const double* r2, double* out, std::size_t n) {
  if (spec.family == KernelFamily::gaussian)
    simd::gaussian_profile(out, r2, n, spec.epsilon);
  else
    simd::matern2_profile(out, r2, n, spec.epsilon);
}

void rbf_dprofile2(const KernelSpec& spec, const double* r2, double* out, std::size_t n) {
  const double e2 = spec.epsilon * spec.epsilon;
  if (spec.family == KernelFamily::gaussian) {
    simd::gaussian_profile(out, r2, n, spec.epsilon);
    const double c = -2.0 * e2;
    for (std::size_t i = 0; i < n; ++i) out[i] *= c;
  } else {
    // -eps^2 exp(-eps r); reuse the vector exp on t = -eps sqrt(rho)
    for (std::size_t i = 0; i < n; ++i) out[i] = -spec.epsilon * std::sqrt(r2[i]);
    simd::vexp(out, out, n);
    for (std::size_t i = 0; i < n; ++i) out[i] *= -e2;
  }
}

AugmentedNodeSet augment(const NodeSet& nodes, const std::vector<double>& scaling_values) {
  const std::size_t n = nodes.size();
  if (scaling_values.size() != n)
    throw argument_error("scaling value count " + std::to_string(scaling_values.size()) +
                         " does not match node count " + std::to_string(n));
  AugmentedNodeSet aug;
  aug.points.dim = nodes.dim + 1;
  aug.points.coords.resize(n * aug.points.dim);
  for (std::size_t i = 0; i < n; ++i) {
    double* dst = aug.points.coords.data() + i * aug.points.dim;
    std::memcpy(dst, nodes.point(i), nodes.dim * sizeof(double));
    dst[nodes.dim] = scaling_values[i];
  }
  aug.scaling_values = scaling_values;
  return aug;
}

Matrix gram(const KernelSpec& spec, const NodeCols& cols) {
  validate(spec);
  const std::size_t n = cols.size();
  if (n == 0) throw argument_error("gram of empty node set");
  Matrix k(n, n);
  std::vector<double> r2(n);
  // assemble the lower triangle row by row, then mirror: half the profile
  // evaluations and exact symmetry by construction
  for (std::size_t i = 0; i < n; ++i) {
    cols.sqdist_to(i, r2.data(), i + 1);
    check_r2_unique(r2.data(), i, i);
    rbf_profile(spec, r2.data(), k.row(i), i + 1);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) k(i, j) = k(j, i);
  return k;
}

Matrix gram(const KernelSpec& spec, const NodeSet& nodes) {
  return gram(spec, NodeCols::from(nodes));
}

} // namespace vsk
