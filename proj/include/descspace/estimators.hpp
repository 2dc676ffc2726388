#pragma once

#include <Eigen/Dense>
#include <vector>

#include "descspace/channels.hpp"
#include "descspace/nn.hpp"
#include "descspace/table.hpp"

namespace descspace::estimators {

/// Contrastive loss over two embedding batches with similarity
/// s(a, b) = -|a - b|^2 / tau.  `bound_bits` = log2(batch) - loss / ln 2 is
/// the matching mutual-information lower bound; it never exceeds log2(batch).
struct InfoNceResult {
  double loss_nats = 0.0;
  double bound_bits = 0.0;
};

/// Computes the loss on aligned batches (row α of `a` pairs with row α of
/// `b`).  When `da` / `db` are given they receive d(loss)/d(embedding).
InfoNceResult infonce_from_embeddings(const Eigen::MatrixXd& a,
                                      const Eigen::MatrixXd& b, double tau,
                                      Eigen::MatrixXd* da = nullptr,
                                      Eigen::MatrixXd* db = nullptr);

/// Critic pair attached to one multi-component term: one network embeds the
/// concatenated latents, the other the concatenated one-hot source values.
struct NcePair {
  Subset term;
  nn::Mlp critic_u;
  nn::Mlp critic_x;
  double tau = 1.0;
};

struct NcePairEval {
  InfoNceResult result;
  nn::MlpGrads grads_u;    // d(loss)/d(critic_u params)
  nn::MlpGrads grads_x;    // d(loss)/d(critic_x params)
  Eigen::MatrixXd d_u_in;  // d(loss)/d(latent input)
};

/// Full forward/backward pass of one critic pair.  `u_in` is batch x
/// (Σ dims), `x_onehot` is batch x (Σ arities).
NcePairEval evaluate_pair(const NcePair& pair, const Eigen::MatrixXd& u_in,
                          const Eigen::MatrixXd& x_onehot);

/// Buffers for evaluate_pair_reuse; reused across steps so the training loop
/// stays allocation-free once shapes settle.
struct NcePairWorkspace {
  nn::MlpTape tape_u, tape_x;
  nn::MlpScratch scratch_u, scratch_x;
  Eigen::MatrixXd scores, da, db;
  Eigen::VectorXd sq_a, sq_b, diag, row_max, row_sum, row_g, col_g;
};

/// Like evaluate_pair, but accumulates parameter gradients into the given
/// buffers (caller zeroes them between steps) and leaves d(loss)/d(latent
/// input) in ws.scratch_u.d_input.
InfoNceResult evaluate_pair_reuse(const NcePair& pair,
                                  const Eigen::MatrixXd& u_in,
                                  const Eigen::MatrixXd& x_onehot,
                                  NcePairWorkspace& ws, nn::MlpGrads& grads_u,
                                  nn::MlpGrads& grads_x);

/// evaluate_pair_reuse with the source side given as one-hot group indices:
/// row r of the implied critic_x input activates column active(r, g) per
/// group.  The x-side input gradient is skipped.
InfoNceResult evaluate_pair_onehot_reuse(const NcePair& pair,
                                         const Eigen::MatrixXd& u_in,
                                         const Eigen::MatrixXi& active,
                                         NcePairWorkspace& ws,
                                         nn::MlpGrads& grads_u,
                                         nn::MlpGrads& grads_x);

/// Critic-free lower bound on I(U_i ; X_i) from exact channel densities:
/// mean over the batch of log q(u_α | x_α) - log[(1/B) Σ_β q(u_α | x_β)].
/// Also bounded by log2(batch).  The estimate is accumulated in sorted order
/// so it is invariant under reordering the batch.
struct ComponentBoundEval {
  double bound_nats = 0.0;
  double bound_bits = 0.0;
  Eigen::MatrixXd d_mu;         // d(bound)/d(mu), including the sample path
  Eigen::MatrixXd d_log_sigma;  // d(bound)/d(log_sigma), same
};

/// `x` holds the batch source values, `eps` the standard-normal draws that
/// produced u = mu[x] + exp(log_sigma[x]) ⊙ eps.  Gradients are filled only
/// when `need_grads` is set.
ComponentBoundEval component_info_bound(const channels::SoftEncoder& enc,
                                        const std::vector<int>& x,
                                        const Eigen::MatrixXd& eps,
                                        bool need_grads);

}  // namespace descspace::estimators
