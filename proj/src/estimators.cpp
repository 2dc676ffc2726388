#include "descspace/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "descspace/errors.hpp"
#include "descspace/numeric.hpp"

namespace descspace::estimators {

namespace {

// Shared implementation: loss always, gradients into ws.da / ws.db on
// request.  All intermediates live in the workspace; the score matrix is
// transformed in place (scores, then row-softmax, then d(loss)/d(score)) and
// the per-element passes run down columns to match the storage order.
InfoNceResult infonce_core(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           double tau, NcePairWorkspace& ws, bool want_grads) {
  const Eigen::Index batch = a.rows();
  if (batch < 2) throw Error("contrastive batch needs at least two rows");
  if (b.rows() != batch || b.cols() != a.cols()) {
    throw Error("embedding batches must have matching shapes");
  }
  if (!(tau > 0.0)) throw Error("temperature must be positive");

  ws.sq_a = a.rowwise().squaredNorm() / tau;
  ws.sq_b = b.rowwise().squaredNorm() / tau;
  ws.scores = 2.0 / tau * (a * b.transpose());

  ws.row_max.resize(batch);
  ws.row_max.setConstant(-std::numeric_limits<double>::infinity());
  for (Eigen::Index c = 0; c < batch; ++c) {
    auto col = ws.scores.col(c);
    col = (col - ws.sq_a).array() - ws.sq_b[c];
    ws.row_max = ws.row_max.cwiseMax(col);
  }

  ws.diag = ws.scores.diagonal();
  ws.row_sum.resize(batch);
  ws.row_sum.setZero();
  for (Eigen::Index c = 0; c < batch; ++c) {
    auto col = ws.scores.col(c);
    col = (col - ws.row_max).array().exp();
    ws.row_sum += col;
  }

  double loss = 0.0;
  for (Eigen::Index r = 0; r < batch; ++r) {
    const double lse = ws.row_max[r] + std::log(ws.row_sum[r]);
    loss += lse - ws.diag[r];
  }
  loss /= static_cast<double>(batch);

  InfoNceResult result;
  result.loss_nats = loss;
  result.bound_bits =
      std::log2(static_cast<double>(batch)) - loss / kLn2;

  if (want_grads) {
    // d(loss)/d(score) = (row-softmax - identity) / batch; chain through
    // s = -|a - b|^2 / tau.
    const double inv_batch = 1.0 / static_cast<double>(batch);
    ws.row_sum = inv_batch * ws.row_sum.cwiseInverse();
    ws.row_g.resize(batch);
    ws.row_g.setZero();
    ws.col_g.resize(batch);
    for (Eigen::Index c = 0; c < batch; ++c) {
      auto col = ws.scores.col(c);
      col.array() *= ws.row_sum.array();
      col[c] -= inv_batch;
      ws.row_g += col;
      ws.col_g[c] = col.sum();
    }
    ws.da = 2.0 / tau *
            (ws.scores * b - (a.array().colwise() * ws.row_g.array()).matrix());
    ws.db = 2.0 / tau *
            (ws.scores.transpose() * a -
             (b.array().colwise() * ws.col_g.array()).matrix());
  }
  return result;
}

}  // namespace

InfoNceResult infonce_from_embeddings(const Eigen::MatrixXd& a,
                                      const Eigen::MatrixXd& b, double tau,
                                      Eigen::MatrixXd* da,
                                      Eigen::MatrixXd* db) {
  NcePairWorkspace ws;
  const InfoNceResult result = infonce_core(a, b, tau, ws, da || db);
  if (da) *da = std::move(ws.da);
  if (db) *db = std::move(ws.db);
  return result;
}

InfoNceResult evaluate_pair_reuse(const NcePair& pair,
                                  const Eigen::MatrixXd& u_in,
                                  const Eigen::MatrixXd& x_onehot,
                                  NcePairWorkspace& ws, nn::MlpGrads& grads_u,
                                  nn::MlpGrads& grads_x) {
  const Eigen::MatrixXd& a = nn::forward_reuse(pair.critic_u, u_in, ws.tape_u);
  const Eigen::MatrixXd& b =
      nn::forward_reuse(pair.critic_x, x_onehot, ws.tape_x);
  const InfoNceResult result = infonce_core(a, b, pair.tau, ws, true);
  nn::backward_reuse(pair.critic_u, ws.tape_u, ws.da, grads_u, ws.scratch_u);
  nn::backward_reuse(pair.critic_x, ws.tape_x, ws.db, grads_x, ws.scratch_x);
  return result;
}

InfoNceResult evaluate_pair_onehot_reuse(const NcePair& pair,
                                         const Eigen::MatrixXd& u_in,
                                         const Eigen::MatrixXi& active,
                                         NcePairWorkspace& ws,
                                         nn::MlpGrads& grads_u,
                                         nn::MlpGrads& grads_x) {
  const Eigen::MatrixXd& a = nn::forward_reuse(pair.critic_u, u_in, ws.tape_u);
  const Eigen::MatrixXd& b =
      nn::forward_onehot_reuse(pair.critic_x, active, ws.tape_x);
  const InfoNceResult result = infonce_core(a, b, pair.tau, ws, true);
  nn::backward_reuse(pair.critic_u, ws.tape_u, ws.da, grads_u, ws.scratch_u);
  nn::backward_onehot(pair.critic_x, ws.tape_x, active, ws.db, grads_x,
                      ws.scratch_x);
  return result;
}

NcePairEval evaluate_pair(const NcePair& pair, const Eigen::MatrixXd& u_in,
                          const Eigen::MatrixXd& x_onehot) {
  NcePairEval eval;
  NcePairWorkspace ws;
  eval.grads_u = nn::zero_grads(pair.critic_u);
  eval.grads_x = nn::zero_grads(pair.critic_x);
  eval.result =
      evaluate_pair_reuse(pair, u_in, x_onehot, ws, eval.grads_u, eval.grads_x);
  eval.d_u_in = std::move(ws.scratch_u.d_input);
  return eval;
}

ComponentBoundEval component_info_bound(const channels::SoftEncoder& enc,
                                        const std::vector<int>& x,
                                        const Eigen::MatrixXd& eps,
                                        bool need_grads) {
  const Eigen::Index batch = static_cast<Eigen::Index>(x.size());
  const int m = enc.outcomes();
  const int dim = enc.dim();
  if (batch < 2) throw Error("batch needs at least two samples");
  if (eps.rows() != batch || eps.cols() != dim) {
    throw Error("noise batch shape mismatch");
  }
  for (int a : x) {
    if (a < 0 || a >= m) throw Error("source value out of range");
  }

  const Eigen::ArrayXXd sigma = enc.log_sigma.array().exp();

  // Latents under reparameterization and their densities against every
  // source value: dv(α, a) = log q(u_α | a).
  Eigen::MatrixXd u(batch, dim);
  for (Eigen::Index r = 0; r < batch; ++r) {
    for (int j = 0; j < dim; ++j) {
      u(r, j) = enc.mu(x[r], j) + sigma(x[r], j) * eps(r, j);
    }
  }

  Eigen::MatrixXd dv(batch, m);
  Eigen::ArrayXXd z(batch, dim);  // reused per value
  std::vector<Eigen::ArrayXXd> z_all;
  if (need_grads) z_all.resize(m);
  for (int a = 0; a < m; ++a) {
    double base = 0.0;
    for (int j = 0; j < dim; ++j) base -= enc.log_sigma(a, j) + kHalfLog2Pi;
    for (Eigen::Index r = 0; r < batch; ++r) {
      double s = 0.0;
      for (int j = 0; j < dim; ++j) {
        const double zz = (u(r, j) - enc.mu(a, j)) / sigma(a, j);
        z(r, j) = zz;
        s -= 0.5 * zz * zz;
      }
      dv(r, a) = s + base;
    }
    if (need_grads) z_all[a] = z;
  }

  std::vector<double> count(m, 0.0);
  for (int a : x) count[a] += 1.0;

  const Eigen::VectorXd row_max = dv.rowwise().maxCoeff();
  Eigen::MatrixXd shifted = (dv.colwise() - row_max).array().exp().matrix();
  Eigen::VectorXd mix(batch);
  for (Eigen::Index r = 0; r < batch; ++r) {
    double t = 0.0;
    for (int a = 0; a < m; ++a) t += count[a] * shifted(r, a);
    mix[r] = t;
  }

  const double log_batch = std::log(static_cast<double>(batch));
  std::vector<double> per_row(batch);
  for (Eigen::Index r = 0; r < batch; ++r) {
    per_row[r] =
        dv(r, x[r]) - (row_max[r] + std::log(mix[r])) + log_batch;
  }
  // Sorted accumulation keeps the estimate identical under batch reordering.
  std::vector<double> ordered(per_row);
  std::sort(ordered.begin(), ordered.end());
  const double bound = neumaier_sum(ordered) / static_cast<double>(batch);

  ComponentBoundEval eval;
  eval.bound_nats = bound;
  eval.bound_bits = bound / kLn2;
  if (!need_grads) return eval;

  eval.d_mu = Eigen::MatrixXd::Zero(m, dim);
  eval.d_log_sigma = Eigen::MatrixXd::Zero(m, dim);
  Eigen::MatrixXd du = Eigen::MatrixXd::Zero(batch, dim);

  const double inv_batch = 1.0 / static_cast<double>(batch);
  for (int a = 0; a < m; ++a) {
    if (count[a] == 0.0) continue;
    const Eigen::ArrayXXd& za = z_all[a];
    for (Eigen::Index r = 0; r < batch; ++r) {
      const double softmax_term = count[a] * shifted(r, a) / mix[r];
      const double w = inv_batch * ((x[r] == a ? 1.0 : 0.0) - softmax_term);
      if (w == 0.0) continue;
      for (int j = 0; j < dim; ++j) {
        const double zs = za(r, j) / sigma(a, j);
        eval.d_mu(a, j) += w * za(r, j) / sigma(a, j);
        eval.d_log_sigma(a, j) += w * (za(r, j) * za(r, j) - 1.0);
        du(r, j) += w * -zs;
      }
    }
  }
  for (Eigen::Index r = 0; r < batch; ++r) {
    for (int j = 0; j < dim; ++j) {
      eval.d_mu(x[r], j) += du(r, j);
      eval.d_log_sigma(x[r], j) += du(r, j) * sigma(x[r], j) * eps(r, j);
    }
  }
  return eval;
}

}  // namespace descspace::estimators
