#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "descspace/channels.hpp"
#include "descspace/estimators.hpp"
#include "descspace/objective.hpp"
#include "descspace/table.hpp"

namespace descspace::trainer {

/// Constraint-strength schedule: constant at `start` for the first half of
/// training, then geometric interpolation from `start` to `end` over the
/// second half.
struct GammaSchedule {
  double start = 1.0;
  double end = 1.0;
};

double gamma_at(const GammaSchedule& schedule, long step, long total_steps);

struct TrainConfig {
  int latent_dim = 2;
  std::vector<int> critic_hidden = {256};
  int embed_dim = 32;
  double tau = 1.0;
  int batch = 256;
  long steps = 50000;
  long extra_critic_steps = 0;
  double encoder_lr = 1e-2;
  double critic_lr = 3e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  GammaSchedule gamma;
  double init_mu_scale = 0.1;
  long eval_samples = 200000;
  int checkpoints = 50;
  int repeats = 1;
  std::uint64_t seed = 0;
  double guard_slack_bits = 5.0;
  long guard_patience = 1000;
};

struct TermEstimate {
  Subset term;
  double bits = 0.0;
  double se_bits = 0.0;
};

struct EvalResult {
  std::vector<TermEstimate> terms;  // aligned with the objective's terms
  double iin_bits = 0.0;            // Σ singleton estimates
  double iin_se_bits = 0.0;         // quadrature over singleton SEs
  double quantity_bits = 0.0;       // Σ quantity_weight_k * estimate_k
  double quantity_se_bits = 0.0;    // quadrature over weighted SEs
};

/// Monte Carlo evaluation of every objective term against exact channel
/// densities.  One shared sample set serves all terms: each draw samples a
/// full system outcome and one latent per component, caches the per-value
/// log densities, and scores every term's mixture from the cache.  Sharded
/// deterministically, so results do not depend on thread count.
EvalResult evaluate(const JointTable& table,
                    const objective::CheckedObjective& objective,
                    const std::vector<channels::SoftEncoder>& encoders,
                    long n_samples, std::uint64_t seed);

/// Mutable optimization state: per-component Gaussian encoders (lookup
/// tables, not networks) plus one critic pair per weighted multi-component
/// term.  Exposes the loss/gradient evaluation both for the training loop
/// and for finite-difference checks.
class TrainState {
 public:
  TrainState(const JointTable& table,
             const objective::CheckedObjective& objective,
             const TrainConfig& config);

  struct Batch {
    std::vector<int> x;                 // batch * n_components, row-major
    std::vector<Eigen::MatrixXd> eps;   // per component: batch x latent_dim
  };

  Batch sample_batch(RngStream& rng) const;

  /// Same draws as sample_batch, written into caller-kept buffers.
  void sample_batch_into(Batch& batch, RngStream& rng) const;

  struct Losses {
    double encoder_nats = 0.0;   // γ |I_in - target| + Σ_k v_k L_k
    double critic_nats = 0.0;    // Σ_k L_k (every critic minimizes its own)
    double constraint_nats = 0.0;
    double iin_bits = 0.0;
    std::vector<double> pair_loss_nats;
    std::vector<double> pair_bound_bits;
  };

  /// Forward/backward pass on a fixed batch.  Parameter gradients land in
  /// the internal buffers read by the optimizers and by gradient checks.
  /// Encoder gradients are those of encoder_nats, critic gradients those of
  /// critic_nats.
  Losses loss_and_grads(const Batch& batch, double gamma,
                        double iin_target_bits, bool need_encoder_grads);

  int n_components() const { return n_; }
  int n_pairs() const { return static_cast<int>(pairs_.size()); }
  const std::vector<channels::SoftEncoder>& encoders() const {
    return encoders_;
  }
  std::vector<channels::SoftEncoder>& encoders() { return encoders_; }
  const std::vector<estimators::NcePair>& pairs() const { return pairs_; }

  /// Parameter and gradient pointers in optimizer order.
  std::vector<Eigen::MatrixXd*> encoder_params();
  std::vector<const Eigen::MatrixXd*> encoder_grads() const;
  std::vector<Eigen::MatrixXd*> critic_params();
  std::vector<const Eigen::MatrixXd*> critic_grads() const;

  double total_component_entropy_bits() const { return sum_h_bits_; }

 private:
  int n_ = 0;
  const JointTable* table_ = nullptr;
  objective::CheckedObjective objective_;
  TrainConfig config_;
  double sum_h_bits_ = 0.0;
  std::vector<double> cumulative_mass_;
  std::vector<channels::SoftEncoder> encoders_;
  std::vector<estimators::NcePair> pairs_;
  std::vector<std::size_t> pair_term_;   // objective term index per pair
  std::vector<double> pair_weight_;      // ascent weight per pair
  std::vector<Eigen::MatrixXd> d_mu_, d_log_sigma_;
  std::vector<nn::MlpGrads> critic_grads_u_, critic_grads_x_;
  // Step workspaces, allocation-free once batch shapes settle.
  std::vector<estimators::NcePairWorkspace> pair_ws_;
  std::vector<Eigen::MatrixXd> u_, u_cat_;
  std::vector<Eigen::MatrixXi> x_active_;
  std::vector<std::vector<int>> x_col_;
};

/// One trained description at a fixed information target.
struct RunResult {
  std::vector<channels::SoftEncoder> encoders;
  EvalResult eval;
  double iin_target_bits = 0.0;
  long steps_run = 0;
};

/// Trains at the objective's information target with the staged γ schedule.
RunResult run_point(const JointTable& table,
                    const objective::CheckedObjective& objective,
                    const TrainConfig& config);

/// One checkpoint of a sweep: the information target at that step and the
/// post-hoc evaluation of the snapshotted encoders.
struct ScanRecord {
  long step = 0;
  double iin_target_bits = 0.0;
  EvalResult eval;
  std::vector<channels::SoftEncoder> encoders;
};

struct ScanResult {
  std::vector<ScanRecord> records;
};

/// Single continuous run whose information target ramps linearly from 0 to
/// Σ_i H(X_i); encoders are snapshotted at `checkpoints` evenly spaced steps
/// and evaluated after training finishes.
ScanResult run_scan(const JointTable& table,
                    const objective::CheckedObjective& objective,
                    const TrainConfig& config);

/// Repeated runs with derived seeds; keeps the run whose evaluated quantity
/// is extremal for the objective's direction (ties go to the lowest index).
struct BestOfPoints {
  RunResult best;
  int chosen = 0;
  std::vector<double> quantities_bits;
};

BestOfPoints best_of_points(const JointTable& table,
                            const objective::CheckedObjective& objective,
                            const TrainConfig& config, int repeats);

/// Same selection over scans, scored by each scan's extremal record.
struct BestOfScans {
  ScanResult best;
  int chosen = 0;
  std::vector<double> quantities_bits;
};

BestOfScans best_of_scans(const JointTable& table,
                          const objective::CheckedObjective& objective,
                          const TrainConfig& config, int repeats);

}  // namespace descspace::trainer
