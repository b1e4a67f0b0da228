#include "vsk/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "vsk/errors.hpp"
#include "vsk/rng.hpp"
#include "vsk/simd.hpp"

namespace vsk {

namespace {

Matrix points_matrix(const NodeSet& nodes) {
  if (nodes.dim != 2) throw argument_error("scaling networks take 2d inputs");
  Matrix x(nodes.size(), 2);
  x.a = nodes.coords;
  return x;
}

void check_distinct(const NodeCols& cols) {
  const std::size_t n = cols.size();
  std::vector<double> r2(n);
  for (std::size_t i = 1; i < n; ++i) {
    cols.sqdist_to(i, r2.data(), i);
    for (std::size_t k = 0; k < i; ++k)
      if (r2[k] < 1e-28)
        throw argument_error("duplicate nodes " + std::to_string(k) + " and " +
                             std::to_string(i));
  }
}

// workspace for loss and gradient evaluations of the joint objective; the
// kernel matrix K and the antisymmetric sensitivity S (dK_ik/dfbar_i =
// S_ik = dprofile2_ik * (fbar_i - fbar_k)) are assembled together, lower
// triangle first, then mirrored
struct JointCore {
  const ScatteredData& data;
  KernelSpec kernel;
  std::size_t n;
  Matrix x;      // n x 2 network inputs
  NodeCols cols; // base coordinates plus the fbar column, rewritten per eval
  Matrix k, s;
  std::vector<double> fbar, r2, dp, keta, r, kr, seta, sr, upstream;
  ForwardCache cache;

  JointCore(const ScatteredData& d, const KernelSpec& ks)
      : data(d), kernel(ks), n(d.nodes.size()) {
    validate(kernel);
    if (n == 0) throw argument_error("training needs at least one node");
    if (d.values.size() != n)
      throw argument_error("value count does not match node count");
    x = points_matrix(d.nodes);
    cols = NodeCols::from(d.nodes);
    check_distinct(cols);
    cols.push_col(std::vector<double>(n, 0.0));
    k = Matrix(n, n);
    s = Matrix(n, n);
    fbar.resize(n);
    r2.resize(n);
    dp.resize(n);
    keta.resize(n);
    r.resize(n);
    kr.resize(n);
    seta.resize(n);
    sr.resize(n);
    upstream.resize(n);
  }

  double eval_loss(const NetworkParams& theta, const std::vector<double>& eta) {
    if (eta.size() != n) throw argument_error("eta length does not match node count");
    network_forward(theta, x, cache);
    for (std::size_t i = 0; i < n; ++i) {
      fbar[i] = cache.out(i, 0);
      if (!std::isfinite(fbar[i]))
        throw diverged_error("scaling network output is not finite");
    }
    cols.cols[2] = fbar;
    for (std::size_t i = 0; i < n; ++i) {
      cols.sqdist_to(i, r2.data(), i + 1);
      rbf_profile(kernel, r2.data(), k.row(i), i + 1);
      rbf_dprofile2(kernel, r2.data(), dp.data(), i + 1);
      double* srow = s.row(i);
      for (std::size_t j = 0; j < i; ++j) srow[j] = dp[j] * (fbar[i] - fbar[j]);
      srow[i] = 0.0;
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        k(i, j) = k(j, i);
        s(i, j) = -s(j, i);
      }
    simd::gemv(keta.data(), k.a.data(), eta.data(), n, n);
    for (std::size_t i = 0; i < n; ++i) r[i] = data.values[i] - keta[i];
    const double loss = simd::dot(r.data(), r.data(), n) / static_cast<double>(n);
    if (!std::isfinite(loss)) throw diverged_error("joint training loss is not finite");
    return loss;
  }

  // gradients for the state last prepared by eval_loss
  void gradients(const NetworkParams& theta, const std::vector<double>& eta,
                 std::vector<double>& gtheta, std::vector<double>& geta) {
    const double c = -2.0 / static_cast<double>(n);
    simd::gemv(kr.data(), k.a.data(), r.data(), n, n);
    geta.resize(n);
    for (std::size_t i = 0; i < n; ++i) geta[i] = c * kr[i];
    simd::gemv(seta.data(), s.a.data(), eta.data(), n, n);
    simd::gemv(sr.data(), s.a.data(), r.data(), n, n);
    for (std::size_t i = 0; i < n; ++i)
      upstream[i] = c * (r[i] * seta[i] + eta[i] * sr[i]);
    gtheta = network_backward(theta, cache, upstream);
  }
};

} // namespace

double joint_loss(const NetworkParams& theta, const std::vector<double>& eta,
                  const ScatteredData& data, const KernelSpec& kernel) {
  JointCore core(data, kernel);
  return core.eval_loss(theta, eta);
}

JointGradients joint_gradients(const NetworkParams& theta, const std::vector<double>& eta,
                               const ScatteredData& data, const KernelSpec& kernel) {
  JointCore core(data, kernel);
  JointGradients g;
  g.loss = core.eval_loss(theta, eta);
  core.gradients(theta, eta, g.theta, g.eta);
  return g;
}

JointResult train_joint(const ScatteredData& data, const KernelSpec& kernel,
                        const TrainConfig& cfg) {
  JointCore core(data, kernel);
  const std::size_t n = core.n;
  const int epochs = cfg.max_epochs > 0 ? cfg.max_epochs : 2000;

  NetworkParams theta(scaling_architecture());
  Rng init_rng(cfg.seed, "init");
  init_params(theta, init_rng);
  const std::size_t p = theta.size();

  std::vector<double> eta(n, 0.0);
  if (cfg.eta_warm_start)
    eta = spd_solve(gram(kernel, data.nodes), data.values).solution;

  OptState st = make_opt_state(p + n, cfg.adam);
  JointResult res;
  res.epochs_max = epochs;
  res.min_batch_points = n;
  std::vector<double> gtheta, geta;
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    const double loss = core.eval_loss(theta, eta); // every step sees all n points
    core.gradients(theta, eta, gtheta, geta);
    res.history.push_back({epoch, loss, std::numeric_limits<double>::quiet_NaN(), st.lr});
    adam_begin_step(st);
    adam_update_range(st, cfg.adam, theta.data(), gtheta.data(), 0, p);
    adam_update_range(st, cfg.adam, eta.data(), geta.data(), p, n);
    theta.bump();
    plateau_update(st, cfg.adam, loss);
    res.min_batch_points = std::min(res.min_batch_points, n);
  }
  res.epochs_done = epochs;
  res.theta = std::move(theta);
  res.eta = std::move(eta);
  return res;
}

DirectResult train_direct(const ScatteredData& data, const TrainConfig& cfg) {
  const std::size_t n = data.nodes.size();
  if (data.values.size() != n)
    throw argument_error("value count does not match node count");
  if (data.nodes.dim != 2) throw argument_error("direct training expects 2d nodes");
  const int epochs = cfg.max_epochs > 0 ? cfg.max_epochs : 1000;
  const std::size_t mb = cfg.minibatch > 0 ? static_cast<std::size_t>(cfg.minibatch) : 32;
  const auto val_count =
      static_cast<std::size_t>(std::floor(cfg.validation_fraction * static_cast<double>(n)));
  if (val_count == 0 || val_count >= n)
    throw argument_error("validation split needs 0 < floor(frac*n) < n");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng split_rng(cfg.seed, "split");
  split_rng.shuffle(perm);
  std::vector<std::size_t> train_idx(perm.begin() + static_cast<std::ptrdiff_t>(val_count),
                                     perm.end());
  const std::size_t tn = train_idx.size();

  NetworkParams theta(scaling_architecture());
  Rng init_rng(cfg.seed, "init");
  init_params(theta, init_rng);
  const std::size_t p = theta.size();
  OptState st = make_opt_state(p, cfg.adam);
  Rng shuffle_rng(cfg.seed, "shuffle");

  Matrix xval(val_count, 2);
  std::vector<double> yval(val_count);
  for (std::size_t j = 0; j < val_count; ++j) {
    const double* pt = data.nodes.point(perm[j]);
    xval(j, 0) = pt[0];
    xval(j, 1) = pt[1];
    yval[j] = data.values[perm[j]];
  }

  ForwardCache cache;
  DirectResult res;
  res.epochs_max = epochs;
  res.train_count = tn;
  res.val_count = val_count;
  std::vector<double> upstream;
  bool stopped = false;
  for (int epoch = 1; epoch <= epochs && !stopped; ++epoch) {
    shuffle_rng.shuffle(train_idx);
    double sse = 0.0;
    for (std::size_t start = 0; start < tn; start += mb) {
      const std::size_t bs = std::min(mb, tn - start);
      Matrix xb(bs, 2);
      std::vector<double> yb(bs);
      for (std::size_t j = 0; j < bs; ++j) {
        const double* pt = data.nodes.point(train_idx[start + j]);
        xb(j, 0) = pt[0];
        xb(j, 1) = pt[1];
        yb[j] = data.values[train_idx[start + j]];
      }
      network_forward(theta, xb, cache);
      upstream.resize(bs);
      for (std::size_t j = 0; j < bs; ++j) {
        const double e = cache.out(j, 0) - yb[j];
        if (!std::isfinite(e)) throw diverged_error("network output is not finite");
        sse += e * e;
        upstream[j] = 2.0 * e / static_cast<double>(bs);
      }
      const auto g = network_backward(theta, cache, upstream);
      adam_step(st, cfg.adam, theta.data(), g.data(), p);
      theta.bump();
    }
    const double train_mse = sse / static_cast<double>(tn);

    network_forward(theta, xval, cache);
    double val_sse = 0.0;
    for (std::size_t j = 0; j < val_count; ++j) {
      const double e = cache.out(j, 0) - yval[j];
      val_sse += e * e;
    }
    const double val_mse = val_sse / static_cast<double>(val_count);

    res.history.push_back({epoch, train_mse, val_mse, st.lr});
    res.epochs_done = epoch;
    plateau_update(st, cfg.adam, val_mse);
    if (early_stop_update(st, cfg.adam, val_mse, theta.data(), p, epoch)) stopped = true;
  }
  if (!st.best_snapshot.empty()) theta.set_flat(st.best_snapshot);
  res.best_epoch = st.best_epoch;
  res.best_val_mse = st.monitor_best;
  res.theta = std::move(theta);
  return res;
}

Interpolant build_network_interpolant(NetworkParams theta, const ScatteredData& data,
                                      const KernelSpec& kernel) {
  auto sp = std::make_shared<const NetworkParams>(std::move(theta));
  return fit(data, kernel, ScalingFunction::network(std::move(sp)));
}

std::vector<double> refit_coefficients(const NetworkParams& theta, const ScatteredData& data,
                                       const KernelSpec& kernel) {
  return build_network_interpolant(theta, data, kernel).coefficients;
}

} // namespace vsk
