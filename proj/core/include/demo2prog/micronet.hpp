#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "demo2prog/arm.hpp"
#include "demo2prog/image.hpp"
#include "demo2prog/rng.hpp"
#include "demo2prog/saliency.hpp"

namespace demo2prog {

/// Dense tanh regressor from (downsampled image, joint angles) to a joint
/// velocity prediction. Small enough that forward, backward and the input
/// Jacobian are hand-rolled and testable against finite differences.
struct MicroNet {
  int input_width = 32;
  int input_height = 24;
  int joint_dim = 3;
  // weights[l] is (out x in); hidden layers use tanh, the output layer is
  // linear.
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  int input_dim() const { return 3 * input_width * input_height + joint_dim; }
  int layer_count() const { return static_cast<int>(weights.size()); }
  std::vector<int> layer_sizes() const;
  void validate() const;
};

MicroNet make_micronet(int input_width, int input_height, int joint_dim,
                       const std::vector<int>& hidden, Rng& rng);

/// Flatten (image, theta) into the net input: interleaved RGB pixels of the
/// area-downsampled image followed by the joint angles.
Eigen::VectorXd net_input(const MicroNet& net, const Image& image,
                          const JointState& theta);

Eigen::VectorXd net_forward(const MicroNet& net, const Eigen::VectorXd& input);

ControlSignal net_forward(const MicroNet& net, const Image& image,
                          const JointState& theta);

struct NetGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

/// MSE loss over the batch (rows of `inputs`/`targets` are samples) and its
/// gradient w.r.t. every weight and bias, by reverse accumulation.
double loss_and_gradients(const MicroNet& net, const Eigen::MatrixXd& inputs,
                          const Eigen::MatrixXd& targets, NetGradients& grads);

double mse_loss(const MicroNet& net, const Eigen::MatrixXd& inputs,
                const Eigen::MatrixXd& targets);

/// Full Jacobian of the net output w.r.t. one input vector
/// (joint_dim x input_dim), one reverse pass per output dimension.
Eigen::MatrixXd input_jacobian(const MicroNet& net,
                               const Eigen::VectorXd& input);

struct TrainConfig {
  int epochs = 300;
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainResult {
  std::vector<double> loss_curve;  // pre-update loss per epoch + final loss
};

/// Full-batch Adam on MSE. Throws DivergenceError when the loss goes
/// non-finite.
TrainResult train(MicroNet& net, const Eigen::MatrixXd& inputs,
                  const Eigen::MatrixXd& targets, const TrainConfig& cfg = {});

/// Per-pixel L1 norm of the output-to-image Jacobian, at the net's input
/// resolution, max-normalized.
SaliencyMap input_gradient_saliency(const MicroNet& net, const Image& image,
                                    const JointState& theta);

// Flat float64 binary with a one-line text header (layer sizes).
void save_micronet(const MicroNet& net, const std::string& path);
MicroNet load_micronet(const std::string& path);

}  // namespace demo2prog
