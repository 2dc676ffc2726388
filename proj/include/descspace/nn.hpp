#pragma once

#include <Eigen/Dense>
#include <vector>

#include "descspace/rng.hpp"

namespace descspace::nn {

/// Fully connected network with leaky-ReLU hidden layers and a linear output
/// layer.  Inputs and activations are row-major batches (batch x features).
struct Mlp {
  std::vector<Eigen::MatrixXd> weights;  // layer l: in_l x out_l
  std::vector<Eigen::MatrixXd> biases;   // layer l: 1 x out_l
  double leak = 0.2;

  int layers() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return static_cast<int>(weights.front().rows()); }
  int output_dim() const { return static_cast<int>(weights.back().cols()); }
};

/// Glorot-uniform weights, zero biases.  Draw order is fixed (layer by
/// layer, row-major), so a given stream state yields the same network.
Mlp make_mlp(int input_dim, const std::vector<int>& hidden, int output_dim,
             double leak, RngStream& rng);

/// Intermediate values saved by forward for the backward pass.
struct MlpTape {
  Eigen::MatrixXd input;
  std::vector<Eigen::MatrixXd> pre;   // pre-activation per layer
  std::vector<Eigen::MatrixXd> post;  // activation per hidden layer
};

/// Runs the network on a batch.  Pass a tape to enable backward.
Eigen::MatrixXd forward(const Mlp& net, const Eigen::MatrixXd& input,
                        MlpTape* tape = nullptr);

/// Forward pass whose activations live in the caller-kept tape, so repeated
/// same-shape calls reuse storage.  Returns the output layer's rows, valid
/// until the tape is next written.
const Eigen::MatrixXd& forward_reuse(const Mlp& net,
                                     const Eigen::MatrixXd& input,
                                     MlpTape& tape);

/// forward_reuse for an input that is a concatenation of one-hot groups:
/// row r of the implied 0/1 input activates column active(r, g) for every
/// group g.  Only the first layer is specialized; the expansion is never
/// materialized.
const Eigen::MatrixXd& forward_onehot_reuse(const Mlp& net,
                                            const Eigen::MatrixXi& active,
                                            MlpTape& tape);

struct MlpGrads {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::MatrixXd> biases;
};

MlpGrads zero_grads(const Mlp& net);

/// Backpropagates d(loss)/d(output), accumulating parameter gradients into
/// `grads` and returning d(loss)/d(input).
Eigen::MatrixXd backward(const Mlp& net, const MlpTape& tape,
                         const Eigen::MatrixXd& d_output, MlpGrads& grads);

/// Delta buffers for backward_reuse.
struct MlpScratch {
  Eigen::MatrixXd delta, swap, d_input;
};

/// Like backward, but keeps intermediates in `scratch`; the returned
/// reference points at scratch.d_input.
const Eigen::MatrixXd& backward_reuse(const Mlp& net, const MlpTape& tape,
                                      const Eigen::MatrixXd& d_output,
                                      MlpGrads& grads, MlpScratch& scratch);

/// Backward pass matching forward_onehot_reuse.  The input gradient is
/// meaningless for one-hot data and is not computed.
void backward_onehot(const Mlp& net, const MlpTape& tape,
                     const Eigen::MatrixXi& active,
                     const Eigen::MatrixXd& d_output, MlpGrads& grads,
                     MlpScratch& scratch);

/// Plain gradient descent on a list of parameter matrices.
class Sgd {
 public:
  explicit Sgd(double lr) : lr_(lr) {}
  void step(const std::vector<Eigen::MatrixXd*>& params,
            const std::vector<const Eigen::MatrixXd*>& grads);

 private:
  double lr_;
};

/// Adam with bias correction.  Moment buffers are allocated on first use and
/// keyed by position, so the parameter list must stay stable across steps.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  void step(const std::vector<Eigen::MatrixXd*>& params,
            const std::vector<const Eigen::MatrixXd*>& grads);

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Eigen::ArrayXXd> m_, v_;
};

/// Pointers to a network's parameters / gradients in a fixed order, for
/// feeding the optimizers.
std::vector<Eigen::MatrixXd*> parameters(Mlp& net);
std::vector<const Eigen::MatrixXd*> gradients(const MlpGrads& grads);

}  // namespace descspace::nn
