#include "vsk/interp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "vsk/errors.hpp"
#include "vsk/simd.hpp"

namespace vsk {

namespace {

void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw argument_error(std::string(what) + " contains a non-finite value");
}

// fill q with the (possibly augmented) coordinates of query k
void make_query(const NodeSet& pts, std::size_t k, const std::vector<double>& fbar,
                std::vector<double>& q) {
  const double* p = pts.point(k);
  std::memcpy(q.data(), p, pts.dim * sizeof(double));
  if (!fbar.empty()) q[pts.dim] = fbar[k];
}

} // namespace

double TabulatedScaling::operator()(double x1, double x2) const {
  if (points.size() == 0) throw argument_error("empty scaling table");
  double best = std::numeric_limits<double>::infinity();
  std::size_t at = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double* p = points.point(i);
    const double dx = p[0] - x1, dy = p[1] - x2;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best) {
      best = d2;
      at = i;
    }
  }
  return values[at];
}

ScalingFunction ScalingFunction::network(std::shared_ptr<const NetworkParams> p) {
  if (!p) throw argument_error("null network scaling");
  return {Network{std::move(p)}};
}

std::vector<double> eval_scaling(const ScalingFunction& s, const NodeSet& pts) {
  const std::size_t n = pts.size();
  std::vector<double> out(n, 0.0);
  if (std::holds_alternative<ScalingFunction::None>(s.fn)) return out;
  if (const auto* c = std::get_if<ScalingFunction::Constant>(&s.fn)) {
    std::fill(out.begin(), out.end(), c->value);
    return out;
  }
  if (const auto* t = std::get_if<TabulatedScaling>(&s.fn)) {
    if (pts.dim != 2) throw argument_error("tabulated scaling is 2d");
    if (t->values.size() != t->points.size())
      throw argument_error("scaling table value count mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      const double* p = pts.point(i);
      out[i] = (*t)(p[0], p[1]);
    }
    return out;
  }
  const auto& net = std::get<ScalingFunction::Network>(s.fn);
  const std::size_t width = net.params->arch().front().in_units;
  if (pts.dim != width) throw argument_error("network scaling input width mismatch");
  // forward in blocks to keep the activation cache small on large grids
  const std::size_t block = 1024;
  ForwardCache cache;
  for (std::size_t start = 0; start < n; start += block) {
    const std::size_t bs = std::min(block, n - start);
    Matrix x(bs, width);
    std::memcpy(x.a.data(), pts.coords.data() + start * width, bs * width * sizeof(double));
    network_forward(*net.params, x, cache);
    for (std::size_t i = 0; i < bs; ++i) out[start + i] = cache.out(i, 0);
  }
  return out;
}

Interpolant fit(const ScatteredData& data, const KernelSpec& kernel,
                const ScalingFunction& scaling) {
  validate(kernel);
  const std::size_t n = data.nodes.size();
  if (n == 0) throw argument_error("fit needs at least one node");
  if (data.values.size() != n)
    throw argument_error("value count " + std::to_string(data.values.size()) +
                         " does not match node count " + std::to_string(n));
  check_finite(data.values, "data values");
  check_finite(data.nodes.coords, "node coordinates");

  auto cache = std::make_shared<FitCache>();
  cache->nodes = NodeCols::from(data.nodes);
  if (!scaling.is_none()) {
    cache->node_scaling = eval_scaling(scaling, data.nodes);
    check_finite(cache->node_scaling, "scaling values");
    cache->nodes.push_col(cache->node_scaling);
  }
  cache->gram = gram(kernel, cache->nodes);
  cache->factor = spd_factor(cache->gram);

  Interpolant itp;
  itp.kernel = kernel;
  itp.centers = data.nodes;
  itp.scaling = scaling;
  itp.values = data.values;
  itp.coefficients = refine_solve(cache->gram, cache->factor, data.values.data(), &itp.node_residual);
  itp.jitter = cache->factor.jitter;
  itp.cache = std::move(cache);
  return itp;
}

std::vector<double> evaluate(const Interpolant& itp, const NodeSet& pts) {
  if (!itp.cache) throw argument_error("interpolant has not been fitted");
  if (pts.dim != itp.centers.dim)
    throw argument_error("query dimension does not match the interpolant");
  const std::size_t n = itp.centers.size();
  const std::size_t m = pts.size();
  std::vector<double> fbar;
  if (!itp.scaling.is_none()) {
    fbar = eval_scaling(itp.scaling, pts);
    check_finite(fbar, "scaling values");
  }
  std::vector<double> out(m), r2(n), kappa(n), q(itp.cache->nodes.dim());
  for (std::size_t k = 0; k < m; ++k) {
    make_query(pts, k, fbar, q);
    itp.cache->nodes.sqdist_point(q.data(), r2.data());
    rbf_profile(itp.kernel, r2.data(), kappa.data(), n);
    out[k] = simd::dot(itp.coefficients.data(), kappa.data(), n);
  }
  return out;
}

double evaluate_one(const Interpolant& itp, double x1, double x2) {
  NodeSet one;
  one.dim = 2;
  one.coords = {x1, x2};
  return evaluate(itp, one)[0];
}

std::vector<double> cardinal_values(const Interpolant& itp, const double* x) {
  if (!itp.cache) throw argument_error("interpolant has not been fitted");
  const std::size_t n = itp.centers.size();
  NodeSet one;
  one.dim = itp.centers.dim;
  one.coords.assign(x, x + one.dim);
  std::vector<double> fbar;
  if (!itp.scaling.is_none()) fbar = eval_scaling(itp.scaling, one);
  std::vector<double> q(itp.cache->nodes.dim()), r2(n), kappa(n);
  make_query(one, 0, fbar, q);
  itp.cache->nodes.sqdist_point(q.data(), r2.data());
  rbf_profile(itp.kernel, r2.data(), kappa.data(), n);
  return refine_solve(itp.cache->gram, itp.cache->factor, kappa.data());
}

LebesgueProfile lebesgue_profile(const Interpolant& itp, const NodeSet& pts) {
  if (!itp.cache) throw argument_error("interpolant has not been fitted");
  if (pts.dim != itp.centers.dim)
    throw argument_error("query dimension does not match the interpolant");
  const std::size_t n = itp.centers.size();
  const std::size_t m = pts.size();
  std::vector<double> fbar;
  if (!itp.scaling.is_none()) fbar = eval_scaling(itp.scaling, pts);

  LebesgueProfile prof;
  prof.eval_points = pts;
  prof.lambda_values.assign(m, 0.0);
  const std::size_t block = 512; // right-hand sides per triangular sweep
  std::vector<double> q(itp.cache->nodes.dim()), r2(n), kappa(n);
  Matrix rhs, sol;
  for (std::size_t start = 0; start < m; start += block) {
    const std::size_t bs = std::min(block, m - start);
    if (rhs.cols != bs) {
      rhs = Matrix(n, bs);
      sol = Matrix(n, bs);
    }
    for (std::size_t j = 0; j < bs; ++j) {
      make_query(pts, start + j, fbar, q);
      itp.cache->nodes.sqdist_point(q.data(), r2.data());
      rbf_profile(itp.kernel, r2.data(), kappa.data(), n);
      for (std::size_t i = 0; i < n; ++i) rhs(i, j) = kappa[i];
    }
    factor_solve_cols(itp.cache->factor, rhs, sol);
    double* acc = prof.lambda_values.data() + start;
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = sol.row(i);
      for (std::size_t j = 0; j < bs; ++j) acc[j] += std::fabs(row[j]);
    }
  }
  prof.lambda_sup = 0.0;
  for (double v : prof.lambda_values) prof.lambda_sup = std::max(prof.lambda_sup, v);
  return prof;
}

std::vector<BoundRecord> bound_check(const ScatteredData& data, const KernelSpec& kernel,
                                     const ScalingFunction& scaling,
                                     const std::vector<double>& f_true, const NodeSet& pts) {
  if (f_true.size() != pts.size())
    throw argument_error("truth values do not match the evaluation points");
  Interpolant pf = fit(data, kernel, scaling);
  const std::size_t n = data.nodes.size();
  std::vector<double> fbar_nodes = pf.cache->node_scaling;
  if (fbar_nodes.empty()) fbar_nodes.assign(n, 0.0); // no scaling: fbar = 0

  // interpolant of fbar itself over the same augmented geometry
  Interpolant pfb = pf;
  pfb.values = fbar_nodes;
  pfb.coefficients =
      refine_solve(pf.cache->gram, pf.cache->factor, fbar_nodes.data(), &pfb.node_residual);

  const auto pf_vals = evaluate(pf, pts);
  const auto pfb_vals = evaluate(pfb, pts);
  const auto leb = lebesgue_profile(pf, pts);

  double enorm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    enorm = std::max(enorm, std::fabs(data.values[i] - fbar_nodes[i]));

  std::vector<BoundRecord> out(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    BoundRecord rec;
    rec.lhs = std::fabs(f_true[k] - pf_vals[k]);
    rec.rhs = std::fabs(f_true[k] - pfb_vals[k]) + enorm * leb.lambda_values[k];
    rec.holds = rec.lhs <= rec.rhs + 1e-8 * (1.0 + rec.rhs);
    out[k] = rec;
  }
  return out;
}

double native_norm_sq(const Interpolant& itp, const std::vector<double>& v) {
  if (!itp.cache) throw argument_error("interpolant has not been fitted");
  if (v.size() != itp.centers.size())
    throw argument_error("vector length does not match the node count");
  const auto x = refine_solve(itp.cache->gram, itp.cache->factor, v.data());
  return simd::dot(v.data(), x.data(), v.size());
}

void write_grid_csv(const std::string& path, const NodeSet& pts,
                    const std::vector<double>& values, int digits) {
  if (pts.dim != 2) throw argument_error("grid export expects 2d points");
  if (values.size() != pts.size())
    throw argument_error("grid export value count mismatch");
  if (digits < 6) digits = 6;
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << "x1,x2,value\n";
  char buf[96];
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double* p = pts.point(i);
    std::snprintf(buf, sizeof buf, "%.*g,%.*g,%.*g\n", digits, p[0], digits, p[1], digits,
                  values[i]);
    out << buf;
  }
  if (!out) throw io_error("failed writing '" + path + "'");
}

} // namespace vsk
