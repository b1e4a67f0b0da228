#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "vsk/linalg.hpp"
#include "vsk/rng.hpp"

namespace vsk {

enum class Activation { elu, linear };
enum class LayerKind { fully_connected, discontinuous, residual_block };

// residual_block: in == out, elu(W2' elu(W1' x + b1) + b2 + x); the
// discontinuous layer adds alpha .* H(z) to the activation, H(0) = 1
struct LayerSpec {
  LayerKind kind = LayerKind::fully_connected;
  std::size_t in_units = 0, out_units = 0;
  Activation activation = Activation::elu;
};

using Architecture = std::vector<LayerSpec>;

Architecture scaling_architecture(); // the fixed R^2 -> R scaling network
std::size_t param_count(const Architecture& arch);
std::string arch_descriptor(const Architecture& arch);
Architecture arch_from_descriptor(const std::string& desc);

// flat parameter vector with structured per-layer views into it. the stamp is
// a mutation counter used to detect stale forward caches: any mutation done
// through raw data() must be followed by bump().
class NetworkParams {
 public:
  NetworkParams() = default;
  explicit NetworkParams(Architecture arch);

  const Architecture& arch() const { return arch_; }
  std::size_t size() const { return flat_.size(); }
  double* data() { return flat_.data(); }
  const double* data() const { return flat_.data(); }
  const std::vector<double>& flat() const { return flat_; }
  void set_flat(const std::vector<double>& v); // size-checked, bumps stamp

  // layer views; alpha only for discontinuous, w2/b2 only for residual blocks
  double* w(std::size_t layer);
  double* b(std::size_t layer);
  double* alpha(std::size_t layer);
  double* w2(std::size_t layer);
  double* b2(std::size_t layer);
  const double* w(std::size_t layer) const;
  const double* b(std::size_t layer) const;
  const double* alpha(std::size_t layer) const;
  const double* w2(std::size_t layer) const;
  const double* b2(std::size_t layer) const;

  std::uint64_t stamp() const { return stamp_; }
  void bump() { ++stamp_; }

 private:
  std::size_t base(std::size_t layer) const;
  Architecture arch_;
  std::vector<std::size_t> base_;
  std::vector<double> flat_;
  std::uint64_t stamp_ = 1;
};

// glorot-uniform weights (limit sqrt(6/(fan_in+fan_out))), zero biases and
// jump amplitudes; weights drawn in layer order, row-major, w then w2
void init_params(NetworkParams& params, Rng& rng);

struct LayerCache {
  Matrix in; // layer input, batch x in_units
  Matrix z;  // pre-activation (residual block: of its first map)
  Matrix a1; // residual block only: elu(z1)
  Matrix s;  // residual block only: skip sum before the final elu
};

struct ForwardCache {
  std::uint64_t params_stamp = 0;
  std::size_t batch = 0;
  std::vector<LayerCache> layers;
  Matrix out; // batch x out_units of the last layer
};

// batched forward; x is batch x in_units row-major
void network_forward(const NetworkParams& params, const Matrix& x, ForwardCache& cache);
double network_forward_one(const NetworkParams& params, double x1, double x2);

// upstream holds dL/d(out) per sample (batch x out_units of the last layer,
// row-major); returns the flat gradient. throws argument_error if the cache
// predates the current parameters.
std::vector<double> network_backward(const NetworkParams& params, const ForwardCache& cache,
                                     const std::vector<double>& upstream);

struct AdamConfig {
  double lr0 = 1e-4;
  double beta1 = 0.9, beta2 = 0.999, eps_hat = 1e-8; // eps added outside the sqrt
  double plateau_factor = 0.5;
  int plateau_patience = 75;
  double lr_floor = 1e-6;
  double improve_tol = 1e-12;
  int early_stop_patience = 550;
};

struct OptState {
  std::vector<double> m, v;
  std::uint64_t t = 0;
  double lr = 0;
  double plateau_best = std::numeric_limits<double>::infinity();
  int plateau_wait = 0;
  double monitor_best = std::numeric_limits<double>::infinity();
  int monitor_wait = 0;
  std::vector<double> best_snapshot;
  int best_epoch = 0;
};

OptState make_opt_state(std::size_t n, const AdamConfig& cfg);

// one update: params -= lr * mhat / (sqrt(vhat) + eps_hat); throws
// diverged_error on non-finite gradients. the range form shares one time step
// across disjoint parameter segments (call begin once, then each range).
void adam_begin_step(OptState& st);
void adam_update_range(OptState& st, const AdamConfig& cfg, double* params,
                       const double* grads, std::size_t offset, std::size_t len);
void adam_step(OptState& st, const AdamConfig& cfg, double* params, const double* grads,
               std::size_t n);

// halve lr (not below lr_floor) after plateau_patience epochs without the
// monitored loss improving by more than improve_tol
void plateau_update(OptState& st, const AdamConfig& cfg, double loss);

// track the best monitored value, snapshot params on improvement, and return
// true once early_stop_patience epochs pass without improvement
bool early_stop_update(OptState& st, const AdamConfig& cfg, double monitored,
                       const double* params, std::size_t n, int epoch);

void save_checkpoint(const std::string& path, const NetworkParams& params,
                     std::uint64_t seed, std::uint32_t epoch);

struct Checkpoint {
  NetworkParams params;
  std::uint64_t seed = 0;
  std::uint32_t epoch = 0;
};

Checkpoint load_checkpoint(const std::string& path);

} // namespace vsk
