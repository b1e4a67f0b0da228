#include "vsk/deltann.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vsk/errors.hpp"
#include "vsk/simd.hpp"

namespace vsk {

namespace {

std::size_t layer_params(const LayerSpec& l) {
  switch (l.kind) {
    case LayerKind::fully_connected: return l.in_units * l.out_units + l.out_units;
    case LayerKind::discontinuous: return l.in_units * l.out_units + 2 * l.out_units;
    case LayerKind::residual_block: return 2 * (l.in_units * l.in_units + l.in_units);
  }
  return 0;
}

void validate_arch(const Architecture& arch) {
  if (arch.empty()) throw argument_error("network architecture is empty");
  for (std::size_t i = 0; i < arch.size(); ++i) {
    const auto& l = arch[i];
    if (l.in_units == 0 || l.out_units == 0)
      throw argument_error("layer " + std::to_string(i) + " has zero width");
    if (l.kind == LayerKind::residual_block && l.in_units != l.out_units)
      throw argument_error("residual block " + std::to_string(i) + " must keep its width");
    if (i > 0 && arch[i - 1].out_units != l.in_units)
      throw argument_error("layer " + std::to_string(i) + " input width " +
                           std::to_string(l.in_units) + " does not match previous output " +
                           std::to_string(arch[i - 1].out_units));
  }
}

// c = a * w + b broadcast over rows; a is m x k, w is k x n
void affine(Matrix& c, const Matrix& a, const double* w, const double* bias, std::size_t m,
            std::size_t k, std::size_t n) {
  c = Matrix(m, n);
  simd::matmul_nn(c.a.data(), a.a.data(), w, m, k, n);
  for (std::size_t i = 0; i < m; ++i) {
    double* row = c.row(i);
    for (std::size_t j = 0; j < n; ++j) row[j] += bias[j];
  }
}

void apply_activation(Matrix& dst, const Matrix& z, Activation act) {
  dst = Matrix(z.rows, z.cols);
  if (act == Activation::elu)
    simd::elu(dst.a.data(), z.a.data(), z.a.size());
  else
    dst.a = z.a;
}

void colsum_add(double* acc, const Matrix& m) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* row = m.row(i);
    for (std::size_t j = 0; j < m.cols; ++j) acc[j] += row[j];
  }
}

template <typename T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void read_raw(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof v);
}

constexpr char k_magic[8] = {'V', 'S', 'K', 'C', 'K', 'P', 'T', '1'};

} // namespace

Architecture scaling_architecture() {
  auto fc = [](std::size_t i, std::size_t o, Activation a) {
    return LayerSpec{LayerKind::fully_connected, i, o, a};
  };
  auto rb = [](std::size_t d) { return LayerSpec{LayerKind::residual_block, d, d, Activation::elu}; };
  auto dl = [](std::size_t i, std::size_t o) {
    return LayerSpec{LayerKind::discontinuous, i, o, Activation::elu};
  };
  return Architecture{
      fc(2, 128, Activation::elu), fc(128, 128, Activation::elu), rb(128),
      fc(128, 128, Activation::elu), rb(128), dl(128, 16),
      fc(16, 128, Activation::elu), rb(128), dl(128, 16),
      fc(16, 128, Activation::elu), rb(128), dl(128, 16),
      fc(16, 128, Activation::elu), fc(128, 1, Activation::linear),
  };
}

std::size_t param_count(const Architecture& arch) {
  std::size_t n = 0;
  for (const auto& l : arch) n += layer_params(l);
  return n;
}

std::string arch_descriptor(const Architecture& arch) {
  std::ostringstream out;
  for (std::size_t i = 0; i < arch.size(); ++i) {
    const auto& l = arch[i];
    if (i) out << ';';
    switch (l.kind) {
      case LayerKind::fully_connected: out << "fc "; break;
      case LayerKind::discontinuous: out << "delta "; break;
      case LayerKind::residual_block: out << "rb " << l.in_units; continue;
    }
    out << l.in_units << ' ' << l.out_units << ' '
        << (l.activation == Activation::elu ? "elu" : "linear");
  }
  return out.str();
}

Architecture arch_from_descriptor(const std::string& desc) {
  Architecture arch;
  std::istringstream stream(desc);
  std::string part;
  while (std::getline(stream, part, ';')) {
    std::istringstream ps(part);
    std::string kind;
    ps >> kind;
    LayerSpec l;
    if (kind == "rb") {
      std::size_t d = 0;
      ps >> d;
      if (!ps) throw argument_error("bad residual block descriptor '" + part + "'");
      l = LayerSpec{LayerKind::residual_block, d, d, Activation::elu};
    } else if (kind == "fc" || kind == "delta") {
      std::size_t i = 0, o = 0;
      std::string act;
      ps >> i >> o >> act;
      if (!ps || (act != "elu" && act != "linear"))
        throw argument_error("bad layer descriptor '" + part + "'");
      l = LayerSpec{kind == "fc" ? LayerKind::fully_connected : LayerKind::discontinuous, i, o,
                    act == "elu" ? Activation::elu : Activation::linear};
    } else {
      throw argument_error("unknown layer kind '" + kind + "'");
    }
    arch.push_back(l);
  }
  validate_arch(arch);
  return arch;
}

NetworkParams::NetworkParams(Architecture arch) : arch_(std::move(arch)) {
  validate_arch(arch_);
  base_.resize(arch_.size());
  std::size_t at = 0;
  for (std::size_t i = 0; i < arch_.size(); ++i) {
    base_[i] = at;
    at += layer_params(arch_[i]);
  }
  flat_.assign(at, 0.0);
}

void NetworkParams::set_flat(const std::vector<double>& v) {
  if (v.size() != flat_.size())
    throw argument_error("flat parameter vector has wrong length");
  flat_ = v;
  bump();
}

std::size_t NetworkParams::base(std::size_t layer) const {
  if (layer >= arch_.size()) throw argument_error("layer index out of range");
  return base_[layer];
}

double* NetworkParams::w(std::size_t l) { return flat_.data() + base(l); }
const double* NetworkParams::w(std::size_t l) const { return flat_.data() + base(l); }

double* NetworkParams::b(std::size_t l) {
  const std::size_t bb = base(l);
  const auto& s = arch_[l];
  const std::size_t off = s.kind == LayerKind::residual_block ? s.in_units * s.in_units
                                                              : s.in_units * s.out_units;
  return flat_.data() + bb + off;
}
const double* NetworkParams::b(std::size_t l) const {
  return const_cast<NetworkParams*>(this)->b(l);
}

double* NetworkParams::alpha(std::size_t l) {
  const std::size_t bb = base(l);
  const auto& s = arch_[l];
  if (s.kind != LayerKind::discontinuous)
    throw argument_error("layer " + std::to_string(l) + " has no jump amplitudes");
  return flat_.data() + bb + s.in_units * s.out_units + s.out_units;
}
const double* NetworkParams::alpha(std::size_t l) const {
  return const_cast<NetworkParams*>(this)->alpha(l);
}

double* NetworkParams::w2(std::size_t l) {
  const std::size_t bb = base(l);
  const auto& s = arch_[l];
  if (s.kind != LayerKind::residual_block)
    throw argument_error("layer " + std::to_string(l) + " has no second map");
  return flat_.data() + bb + s.in_units * s.in_units + s.in_units;
}
const double* NetworkParams::w2(std::size_t l) const {
  return const_cast<NetworkParams*>(this)->w2(l);
}

double* NetworkParams::b2(std::size_t l) {
  const auto& s = arch_[l];
  return w2(l) + s.in_units * s.in_units;
}
const double* NetworkParams::b2(std::size_t l) const {
  return const_cast<NetworkParams*>(this)->b2(l);
}

void init_params(NetworkParams& params, Rng& rng) {
  const auto& arch = params.arch();
  for (std::size_t l = 0; l < arch.size(); ++l) {
    const auto& s = arch[l];
    if (s.kind == LayerKind::residual_block) {
      const double lim = std::sqrt(6.0 / static_cast<double>(2 * s.in_units));
      double* w1 = params.w(l);
      for (std::size_t i = 0; i < s.in_units * s.in_units; ++i) w1[i] = rng.uniform(-lim, lim);
      double* w2 = params.w2(l);
      for (std::size_t i = 0; i < s.in_units * s.in_units; ++i) w2[i] = rng.uniform(-lim, lim);
      double* b1 = params.b(l);
      for (std::size_t i = 0; i < s.in_units; ++i) b1[i] = 0.0;
      double* b2 = params.b2(l);
      for (std::size_t i = 0; i < s.in_units; ++i) b2[i] = 0.0;
    } else {
      const double lim = std::sqrt(6.0 / static_cast<double>(s.in_units + s.out_units));
      double* w = params.w(l);
      for (std::size_t i = 0; i < s.in_units * s.out_units; ++i) w[i] = rng.uniform(-lim, lim);
      double* b = params.b(l);
      for (std::size_t i = 0; i < s.out_units; ++i) b[i] = 0.0;
      if (s.kind == LayerKind::discontinuous) {
        double* a = params.alpha(l);
        for (std::size_t i = 0; i < s.out_units; ++i) a[i] = 0.0;
      }
    }
  }
  params.bump();
}

void network_forward(const NetworkParams& params, const Matrix& x, ForwardCache& cache) {
  const auto& arch = params.arch();
  if (arch.empty()) throw argument_error("network has no layers");
  if (x.rows == 0) throw argument_error("empty batch");
  if (x.cols != arch.front().in_units)
    throw argument_error("input width " + std::to_string(x.cols) + " does not match layer 0");
  cache.params_stamp = params.stamp();
  cache.batch = x.rows;
  cache.layers.assign(arch.size(), {});
  const std::size_t m = x.rows;
  Matrix cur = x;
  for (std::size_t l = 0; l < arch.size(); ++l) {
    const auto& s = arch[l];
    LayerCache& lc = cache.layers[l];
    lc.in = std::move(cur);
    if (s.kind == LayerKind::residual_block) {
      const std::size_t d = s.in_units;
      affine(lc.z, lc.in, params.w(l), params.b(l), m, d, d);
      apply_activation(lc.a1, lc.z, Activation::elu);
      affine(lc.s, lc.a1, params.w2(l), params.b2(l), m, d, d);
      for (std::size_t i = 0; i < lc.s.a.size(); ++i) lc.s.a[i] += lc.in.a[i];
      Matrix out;
      apply_activation(out, lc.s, Activation::elu);
      cur = std::move(out);
    } else {
      affine(lc.z, lc.in, params.w(l), params.b(l), m, s.in_units, s.out_units);
      Matrix act;
      apply_activation(act, lc.z, s.activation);
      if (s.kind == LayerKind::discontinuous) {
        const double* al = params.alpha(l);
        for (std::size_t i = 0; i < m; ++i) {
          const double* zr = lc.z.row(i);
          double* ar = act.row(i);
          for (std::size_t j = 0; j < s.out_units; ++j) {
            // written so that alpha = 0 leaves the activation bit-identical
            const double jump = zr[j] >= 0.0 ? al[j] : 0.0;
            if (jump != 0.0) ar[j] += jump;
          }
        }
      }
      cur = std::move(act);
    }
  }
  cache.out = std::move(cur);
}

double network_forward_one(const NetworkParams& params, double x1, double x2) {
  Matrix x(1, 2);
  x(0, 0) = x1;
  x(0, 1) = x2;
  ForwardCache cache;
  network_forward(params, x, cache);
  return cache.out(0, 0);
}

std::vector<double> network_backward(const NetworkParams& params, const ForwardCache& cache,
                                     const std::vector<double>& upstream) {
  const auto& arch = params.arch();
  if (cache.params_stamp != params.stamp())
    throw argument_error("stale forward cache: parameters changed after the forward pass");
  if (cache.layers.size() != arch.size() || cache.batch == 0)
    throw argument_error("forward cache does not match this network");
  const std::size_t m = cache.batch;
  if (upstream.size() != m * arch.back().out_units)
    throw argument_error("upstream gradient has wrong length");

  std::vector<double> grad(params.size(), 0.0);
  // gradient views share the parameter layout
  NetworkParams off(arch);
  const double* flat0 = off.data();
  auto gw = [&](std::size_t l) { return grad.data() + (off.w(l) - flat0); };
  auto gb = [&](std::size_t l) { return grad.data() + (off.b(l) - flat0); };
  auto galpha = [&](std::size_t l) { return grad.data() + (off.alpha(l) - flat0); };
  auto gw2 = [&](std::size_t l) { return grad.data() + (off.w2(l) - flat0); };
  auto gb2 = [&](std::size_t l) { return grad.data() + (off.b2(l) - flat0); };

  Matrix g(m, arch.back().out_units);
  g.a = upstream;
  for (std::size_t li = arch.size(); li-- > 0;) {
    const auto& s = arch[li];
    const LayerCache& lc = cache.layers[li];
    if (s.kind == LayerKind::residual_block) {
      const std::size_t d = s.in_units;
      Matrix ds(m, d);
      simd::elu_grad(ds.a.data(), lc.s.a.data(), m * d);
      for (std::size_t i = 0; i < ds.a.size(); ++i) ds.a[i] *= g.a[i];
      simd::matmul_tn_acc(gw2(li), lc.a1.a.data(), ds.a.data(), m, d, d);
      colsum_add(gb2(li), ds);
      Matrix da1(m, d);
      simd::matmul_nt(da1.a.data(), ds.a.data(), params.w2(li), m, d, d);
      Matrix dz1(m, d);
      simd::elu_grad(dz1.a.data(), lc.z.a.data(), m * d);
      for (std::size_t i = 0; i < dz1.a.size(); ++i) dz1.a[i] *= da1.a[i];
      simd::matmul_tn_acc(gw(li), lc.in.a.data(), dz1.a.data(), m, d, d);
      colsum_add(gb(li), dz1);
      Matrix gp(m, d);
      simd::matmul_nt(gp.a.data(), dz1.a.data(), params.w(li), m, d, d);
      for (std::size_t i = 0; i < gp.a.size(); ++i) gp.a[i] += ds.a[i]; // skip path
      g = std::move(gp);
    } else {
      Matrix dz(m, s.out_units);
      if (s.activation == Activation::elu) {
        simd::elu_grad(dz.a.data(), lc.z.a.data(), m * s.out_units);
        for (std::size_t i = 0; i < dz.a.size(); ++i) dz.a[i] *= g.a[i];
      } else {
        dz.a = g.a;
      }
      if (s.kind == LayerKind::discontinuous) {
        // d out / d alpha_j = H(z_j); the jump does not feed back into z
        double* ga = galpha(li);
        for (std::size_t i = 0; i < m; ++i) {
          const double* zr = lc.z.row(i);
          const double* gr = g.row(i);
          for (std::size_t j = 0; j < s.out_units; ++j)
            if (zr[j] >= 0.0) ga[j] += gr[j];
        }
      }
      simd::matmul_tn_acc(gw(li), lc.in.a.data(), dz.a.data(), m, s.in_units, s.out_units);
      colsum_add(gb(li), dz);
      Matrix gp(m, s.in_units);
      simd::matmul_nt(gp.a.data(), dz.a.data(), params.w(li), m, s.out_units, s.in_units);
      g = std::move(gp);
    }
  }
  return grad;
}

OptState make_opt_state(std::size_t n, const AdamConfig& cfg) {
  OptState st;
  st.m.assign(n, 0.0);
  st.v.assign(n, 0.0);
  st.lr = cfg.lr0;
  return st;
}

void adam_begin_step(OptState& st) { ++st.t; }

void adam_update_range(OptState& st, const AdamConfig& cfg, double* params,
                       const double* grads, std::size_t offset, std::size_t len) {
  if (offset + len > st.m.size()) throw argument_error("optimizer range out of bounds");
  if (st.t == 0) throw argument_error("adam_update_range before adam_begin_step");
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
  double* m = st.m.data() + offset;
  double* v = st.v.data() + offset;
  for (std::size_t i = 0; i < len; ++i) {
    const double gi = grads[i];
    if (!std::isfinite(gi)) throw diverged_error("non-finite gradient in optimizer step");
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
    const double mhat = m[i] / c1;
    const double vhat = v[i] / c2;
    params[i] -= st.lr * mhat / (std::sqrt(vhat) + cfg.eps_hat);
  }
}

void adam_step(OptState& st, const AdamConfig& cfg, double* params, const double* grads,
               std::size_t n) {
  adam_begin_step(st);
  adam_update_range(st, cfg, params, grads, 0, n);
}

void plateau_update(OptState& st, const AdamConfig& cfg, double loss) {
  if (!std::isfinite(loss)) throw diverged_error("non-finite training loss");
  if (loss < st.plateau_best - cfg.improve_tol) {
    st.plateau_best = loss;
    st.plateau_wait = 0;
    return;
  }
  if (++st.plateau_wait >= cfg.plateau_patience) {
    st.lr = std::max(st.lr * cfg.plateau_factor, cfg.lr_floor);
    st.plateau_wait = 0;
  }
}

bool early_stop_update(OptState& st, const AdamConfig& cfg, double monitored,
                       const double* params, std::size_t n, int epoch) {
  if (!std::isfinite(monitored)) throw diverged_error("non-finite monitored loss");
  if (monitored < st.monitor_best - cfg.improve_tol) {
    st.monitor_best = monitored;
    st.monitor_wait = 0;
    st.best_snapshot.assign(params, params + n);
    st.best_epoch = epoch;
    return false;
  }
  return ++st.monitor_wait >= cfg.early_stop_patience;
}

void save_checkpoint(const std::string& path, const NetworkParams& params,
                     std::uint64_t seed, std::uint32_t epoch) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out.write(k_magic, sizeof k_magic);
  const std::string desc = arch_descriptor(params.arch());
  const std::uint32_t len = static_cast<std::uint32_t>(desc.size());
  write_raw(out, len);
  out.write(desc.data(), len);
  write_raw(out, seed);
  write_raw(out, epoch);
  const std::uint32_t reserved = 0;
  write_raw(out, reserved);
  const std::uint64_t count = params.size();
  write_raw(out, count);
  out.write(reinterpret_cast<const char*>(params.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  if (!out) throw io_error("failed writing '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open checkpoint '" + path + "'");
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, k_magic, sizeof magic) != 0)
    throw io_error("'" + path + "' is not a scaling-network checkpoint");
  std::uint32_t len = 0;
  read_raw(in, len);
  if (!in || len == 0 || len > 1u << 20)
    throw io_error("'" + path + "' has a corrupt architecture descriptor");
  std::string desc(len, '\0');
  in.read(desc.data(), len);
  std::uint64_t seed = 0, count = 0;
  std::uint32_t epoch = 0, reserved = 0;
  read_raw(in, seed);
  read_raw(in, epoch);
  read_raw(in, reserved);
  read_raw(in, count);
  if (!in) throw io_error("'" + path + "' is truncated");
  Architecture arch;
  try {
    arch = arch_from_descriptor(desc);
  } catch (const error& e) {
    throw io_error("'" + path + "': " + e.what());
  }
  if (count != param_count(arch))
    throw io_error("'" + path + "' parameter count does not match its architecture");
  Checkpoint ck;
  ck.params = NetworkParams(arch);
  in.read(reinterpret_cast<char*>(ck.params.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in || in.gcount() != static_cast<std::streamsize>(count * sizeof(double)))
    throw io_error("'" + path + "' is truncated");
  if (in.get() != std::ifstream::traits_type::eof())
    throw io_error("'" + path + "' has trailing bytes");
  ck.params.bump();
  ck.seed = seed;
  ck.epoch = epoch;
  return ck;
}

} // namespace vsk
