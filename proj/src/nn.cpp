#include "descspace/nn.hpp"

#include <cmath>

#include "descspace/errors.hpp"

namespace descspace::nn {

Mlp make_mlp(int input_dim, const std::vector<int>& hidden, int output_dim,
             double leak, RngStream& rng) {
  if (input_dim < 1 || output_dim < 1) {
    throw Error("network dimensions must be positive");
  }
  for (int h : hidden) {
    if (h < 1) throw Error("hidden widths must be positive");
  }
  Mlp net;
  net.leak = leak;
  int in = input_dim;
  std::vector<int> outs(hidden);
  outs.push_back(output_dim);
  for (int out : outs) {
    const double limit = std::sqrt(6.0 / (in + out));
    Eigen::MatrixXd w(in, out);
    for (int r = 0; r < in; ++r) {
      for (int c = 0; c < out; ++c) w(r, c) = rng.uniform(-limit, limit);
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::MatrixXd::Zero(1, out));
    in = out;
  }
  return net;
}

Eigen::MatrixXd forward(const Mlp& net, const Eigen::MatrixXd& input,
                        MlpTape* tape) {
  if (input.cols() != net.input_dim()) {
    throw Error("network input width mismatch");
  }
  if (tape) {
    tape->input = input;
    tape->pre.clear();
    tape->post.clear();
  }
  Eigen::MatrixXd h = input;
  const int layers = net.layers();
  for (int l = 0; l < layers; ++l) {
    Eigen::MatrixXd pre =
        (h * net.weights[l]).rowwise() + net.biases[l].row(0);
    const bool is_output = l == layers - 1;
    if (is_output) {
      if (tape) tape->pre.push_back(pre);
      h = std::move(pre);
    } else {
      Eigen::MatrixXd post =
          (pre.array().max(0.0) + net.leak * pre.array().min(0.0)).matrix();
      if (tape) {
        tape->pre.push_back(std::move(pre));
        tape->post.push_back(post);
      }
      h = std::move(post);
    }
  }
  return h;
}

const Eigen::MatrixXd& forward_reuse(const Mlp& net,
                                     const Eigen::MatrixXd& input,
                                     MlpTape& tape) {
  if (input.cols() != net.input_dim()) {
    throw Error("network input width mismatch");
  }
  const int layers = net.layers();
  tape.input = input;
  tape.pre.resize(layers);
  tape.post.resize(layers - 1);
  for (int l = 0; l < layers; ++l) {
    const Eigen::MatrixXd& below = l == 0 ? tape.input : tape.post[l - 1];
    tape.pre[l] = (below * net.weights[l]).rowwise() + net.biases[l].row(0);
    if (l != layers - 1) {
      tape.post[l] = (tape.pre[l].array().max(0.0) +
                      net.leak * tape.pre[l].array().min(0.0))
                         .matrix();
    }
  }
  return tape.pre[layers - 1];
}

MlpGrads zero_grads(const Mlp& net) {
  MlpGrads g;
  for (const auto& w : net.weights) {
    g.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  }
  for (const auto& b : net.biases) {
    g.biases.push_back(Eigen::MatrixXd::Zero(b.rows(), b.cols()));
  }
  return g;
}

Eigen::MatrixXd backward(const Mlp& net, const MlpTape& tape,
                         const Eigen::MatrixXd& d_output, MlpGrads& grads) {
  const int layers = net.layers();
  Eigen::MatrixXd delta = d_output;
  for (int l = layers - 1; l >= 0; --l) {
    if (l != layers - 1) {
      // Chain through the leaky ReLU of this layer's pre-activation.
      const Eigen::ArrayXXd slope =
          (tape.pre[l].array() > 0.0).cast<double>() * (1.0 - net.leak) +
          net.leak;
      delta = (delta.array() * slope).matrix();
    }
    const Eigen::MatrixXd& below = l == 0 ? tape.input : tape.post[l - 1];
    grads.weights[l] += below.transpose() * delta;
    grads.biases[l] += delta.colwise().sum();
    if (l > 0) delta = delta * net.weights[l].transpose();
  }
  return delta * net.weights[0].transpose();
}

const Eigen::MatrixXd& forward_onehot_reuse(const Mlp& net,
                                            const Eigen::MatrixXi& active,
                                            MlpTape& tape) {
  const int layers = net.layers();
  const Eigen::Index batch = active.rows();
  const Eigen::Index groups = active.cols();
  tape.pre.resize(layers);
  tape.post.resize(layers - 1);
  Eigen::MatrixXd& pre0 = tape.pre[0];
  pre0.resize(batch, net.weights[0].cols());
  pre0.rowwise() = net.biases[0].row(0);
  for (Eigen::Index g = 0; g < groups; ++g) {
    for (Eigen::Index r = 0; r < batch; ++r) {
      pre0.row(r) += net.weights[0].row(active(r, g));
    }
  }
  for (int l = 0; l < layers; ++l) {
    if (l > 0) {
      tape.pre[l] =
          (tape.post[l - 1] * net.weights[l]).rowwise() + net.biases[l].row(0);
    }
    if (l != layers - 1) {
      tape.post[l] = (tape.pre[l].array().max(0.0) +
                      net.leak * tape.pre[l].array().min(0.0))
                         .matrix();
    }
  }
  return tape.pre[layers - 1];
}

const Eigen::MatrixXd& backward_reuse(const Mlp& net, const MlpTape& tape,
                                      const Eigen::MatrixXd& d_output,
                                      MlpGrads& grads, MlpScratch& scratch) {
  const int layers = net.layers();
  scratch.delta = d_output;
  for (int l = layers - 1; l >= 0; --l) {
    if (l != layers - 1) {
      scratch.delta =
          (scratch.delta.array() *
           ((tape.pre[l].array() > 0.0).cast<double>() * (1.0 - net.leak) +
            net.leak))
              .matrix();
    }
    const Eigen::MatrixXd& below = l == 0 ? tape.input : tape.post[l - 1];
    grads.weights[l] += below.transpose() * scratch.delta;
    grads.biases[l] += scratch.delta.colwise().sum();
    if (l > 0) {
      scratch.swap = scratch.delta * net.weights[l].transpose();
      std::swap(scratch.delta, scratch.swap);
    }
  }
  scratch.d_input = scratch.delta * net.weights[0].transpose();
  return scratch.d_input;
}

void backward_onehot(const Mlp& net, const MlpTape& tape,
                     const Eigen::MatrixXi& active,
                     const Eigen::MatrixXd& d_output, MlpGrads& grads,
                     MlpScratch& scratch) {
  const int layers = net.layers();
  scratch.delta = d_output;
  for (int l = layers - 1; l >= 0; --l) {
    if (l != layers - 1) {
      scratch.delta =
          (scratch.delta.array() *
           ((tape.pre[l].array() > 0.0).cast<double>() * (1.0 - net.leak) +
            net.leak))
              .matrix();
    }
    if (l == 0) {
      const Eigen::Index batch = active.rows();
      const Eigen::Index groups = active.cols();
      for (Eigen::Index g = 0; g < groups; ++g) {
        for (Eigen::Index r = 0; r < batch; ++r) {
          grads.weights[0].row(active(r, g)) += scratch.delta.row(r);
        }
      }
      grads.biases[0] += scratch.delta.colwise().sum();
    } else {
      grads.weights[l] += tape.post[l - 1].transpose() * scratch.delta;
      grads.biases[l] += scratch.delta.colwise().sum();
      scratch.swap = scratch.delta * net.weights[l].transpose();
      std::swap(scratch.delta, scratch.swap);
    }
  }
}

void Sgd::step(const std::vector<Eigen::MatrixXd*>& params,
               const std::vector<const Eigen::MatrixXd*>& grads) {
  if (params.size() != grads.size()) throw Error("optimizer list mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    *params[i] -= lr_ * *grads[i];
  }
}

void Adam::step(const std::vector<Eigen::MatrixXd*>& params,
                const std::vector<const Eigen::MatrixXd*>& grads) {
  if (params.size() != grads.size()) throw Error("optimizer list mismatch");
  if (m_.empty()) {
    for (const auto* g : grads) {
      m_.push_back(Eigen::ArrayXXd::Zero(g->rows(), g->cols()));
      v_.push_back(Eigen::ArrayXXd::Zero(g->rows(), g->cols()));
    }
  }
  if (m_.size() != params.size()) throw Error("optimizer list changed size");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto g = grads[i]->array();
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
    params[i]->array() -=
        lr_ * (m_[i] / c1) / ((v_[i] / c2).sqrt() + eps_);
  }
}

std::vector<Eigen::MatrixXd*> parameters(Mlp& net) {
  std::vector<Eigen::MatrixXd*> out;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    out.push_back(&net.weights[l]);
    out.push_back(&net.biases[l]);
  }
  return out;
}

std::vector<const Eigen::MatrixXd*> gradients(const MlpGrads& grads) {
  std::vector<const Eigen::MatrixXd*> out;
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    out.push_back(&grads.weights[l]);
    out.push_back(&grads.biases[l]);
  }
  return out;
}

}  // namespace descspace::nn
