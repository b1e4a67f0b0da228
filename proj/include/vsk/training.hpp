#pragma once

#include <cstdint>
#include <vector>

#include "vsk/data.hpp"
#include "vsk/deltann.hpp"
#include "vsk/interp.hpp"
#include "vsk/kernels.hpp"

namespace vsk {

struct TrainConfig {
  int max_epochs = 0; // 0 = method default: 2000 joint, 1000 direct
  std::uint64_t seed = 0;
  AdamConfig adam;
  int minibatch = 32;                // direct method only
  double validation_fraction = 0.2;  // direct method only (floor(frac*n) points)
  bool eta_warm_start = false;       // joint: start eta from the unscaled solve
};

struct EpochLog {
  int epoch = 0;      // 1-based
  double loss = 0.0;  // joint: full-batch interpolation loss; direct: train mse
  double val_loss = 0.0; // direct only (nan for joint)
  double lr = 0.0;
};

// loss of the joint model: (1/n) ||f - K(fbar_theta) eta||^2
double joint_loss(const NetworkParams& theta, const std::vector<double>& eta,
                  const ScatteredData& data, const KernelSpec& kernel);

struct JointGradients {
  double loss = 0.0;
  std::vector<double> theta;
  std::vector<double> eta;
};

// analytic gradients of joint_loss in both parameter groups
JointGradients joint_gradients(const NetworkParams& theta, const std::vector<double>& eta,
                               const ScatteredData& data, const KernelSpec& kernel);

struct JointResult {
  NetworkParams theta;
  std::vector<double> eta;
  std::vector<EpochLog> history;
  int epochs_done = 0, epochs_max = 0;
  std::size_t min_batch_points = 0; // smallest batch any loss/grad eval used
};

// full-batch Adam on [theta; eta], runs the whole epoch budget
JointResult train_joint(const ScatteredData& data, const KernelSpec& kernel,
                        const TrainConfig& cfg);

struct DirectResult {
  NetworkParams theta; // best-validation snapshot
  std::vector<EpochLog> history;
  int epochs_done = 0, epochs_max = 0;
  int best_epoch = 0;
  double best_val_mse = 0.0;
  std::size_t train_count = 0, val_count = 0;
};

// minibatch regression of the network onto the data values, with a held-out
// validation split, lr plateau schedule, and early stopping
DirectResult train_direct(const ScatteredData& data, const TrainConfig& cfg);

// solve for fresh interpolation coefficients in the kernel scaled by the
// trained network (the coefficients of build_network_interpolant's fit)
std::vector<double> refit_coefficients(const NetworkParams& theta, const ScatteredData& data,
                                       const KernelSpec& kernel);

Interpolant build_network_interpolant(NetworkParams theta, const ScatteredData& data,
                                      const KernelSpec& kernel);

} // namespace vsk
