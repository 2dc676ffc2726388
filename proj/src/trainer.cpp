#include "descspace/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "descspace/errors.hpp"
#include "descspace/infotheory.hpp"
#include "descspace/numeric.hpp"
#include "descspace/parallel.hpp"

namespace descspace::trainer {

namespace {

constexpr long kEvalShard = 4096;

void check_config(const TrainConfig& config) {
  if (config.latent_dim < 1) throw Error("latent_dim must be positive");
  if (config.embed_dim < 1) throw Error("embed_dim must be positive");
  if (config.batch < 2) throw Error("batch must be at least 2");
  if (config.steps < 1) throw Error("steps must be positive");
  if (config.extra_critic_steps < 0) {
    throw Error("extra_critic_steps must be non-negative");
  }
  if (!(config.tau > 0.0)) throw Error("tau must be positive");
  if (!(config.encoder_lr > 0.0) || !(config.critic_lr > 0.0)) {
    throw Error("learning rates must be positive");
  }
  if (!(config.gamma.start > 0.0) || !(config.gamma.end > 0.0)) {
    throw Error("gamma schedule must be positive");
  }
  if (config.eval_samples < 2) throw Error("eval_samples must be at least 2");
  if (config.checkpoints < 1) throw Error("checkpoints must be positive");
  if (config.repeats < 1) throw Error("repeats must be positive");
  for (int h : config.critic_hidden) {
    if (h < 1) throw Error("critic widths must be positive");
  }
}

}  // namespace

double gamma_at(const GammaSchedule& schedule, long step, long total_steps) {
  if (step * 2 <= total_steps) return schedule.start;
  const double progress =
      2.0 * static_cast<double>(step) / static_cast<double>(total_steps) - 1.0;
  return schedule.start * std::pow(schedule.end / schedule.start, progress);
}

TrainState::TrainState(const JointTable& table,
                       const objective::CheckedObjective& objective,
                       const TrainConfig& config)
    : n_(table.n_components()),
      table_(&table),
      objective_(objective),
      config_(config) {
  check_config(config);
  if (objective.n_components != n_) {
    throw Error("objective was validated for a different component count");
  }

  for (double h : infotheory::component_entropies(table)) sum_h_bits_ += h;

  cumulative_mass_.resize(table.size());
  double running = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    running += table.masses()[i];
    cumulative_mass_[i] = running;
  }

  encoders_.reserve(n_);
  for (int i = 0; i < n_; ++i) {
    RngStream rng(derive_seed(config.seed, "encoder-init", i));
    const int m = table.alphabet_sizes()[i];
    channels::SoftEncoder enc;
    enc.mu = Eigen::MatrixXd(m, config.latent_dim);
    for (int a = 0; a < m; ++a) {
      for (int j = 0; j < config.latent_dim; ++j) {
        enc.mu(a, j) = config.init_mu_scale * rng.normal();
      }
    }
    enc.log_sigma = Eigen::MatrixXd::Zero(m, config.latent_dim);
    encoders_.push_back(std::move(enc));
    d_mu_.push_back(Eigen::MatrixXd::Zero(m, config.latent_dim));
    d_log_sigma_.push_back(Eigen::MatrixXd::Zero(m, config.latent_dim));
  }

  for (std::size_t k : objective.multi_terms) {
    const double v = objective.ascent_weights[k];
    if (v == 0.0) continue;
    const Subset& term = objective.terms[k];
    int u_dim = static_cast<int>(term.size()) * config.latent_dim;
    int x_dim = 0;
    for (int c : term) x_dim += table.alphabet_sizes()[c];

    estimators::NcePair pair;
    pair.term = term;
    pair.tau = config.tau;
    {
      RngStream rng(derive_seed(config.seed, "critic-u-init", k));
      pair.critic_u = nn::make_mlp(u_dim, config.critic_hidden,
                                   config.embed_dim, 0.2, rng);
    }
    {
      RngStream rng(derive_seed(config.seed, "critic-x-init", k));
      pair.critic_x = nn::make_mlp(x_dim, config.critic_hidden,
                                   config.embed_dim, 0.2, rng);
    }
    critic_grads_u_.push_back(nn::zero_grads(pair.critic_u));
    critic_grads_x_.push_back(nn::zero_grads(pair.critic_x));
    pairs_.push_back(std::move(pair));
    pair_term_.push_back(k);
    pair_weight_.push_back(v);
  }
  pair_ws_.resize(pairs_.size());
  u_cat_.resize(pairs_.size());
  x_active_.resize(pairs_.size());
  u_.resize(n_);
  x_col_.assign(n_, std::vector<int>(config.batch));
}

TrainState::Batch TrainState::sample_batch(RngStream& rng) const {
  Batch batch;
  sample_batch_into(batch, rng);
  return batch;
}

void TrainState::sample_batch_into(Batch& batch, RngStream& rng) const {
  const int b = config_.batch;
  batch.x.resize(static_cast<std::size_t>(b) * n_);
  for (int r = 0; r < b; ++r) {
    const std::size_t j = rng.categorical_from_cumulative(cumulative_mass_);
    const Outcome& o = table_->outcomes()[j];
    for (int c = 0; c < n_; ++c) batch.x[static_cast<std::size_t>(r) * n_ + c] = o[c];
  }
  batch.eps.resize(n_);
  for (int c = 0; c < n_; ++c) {
    Eigen::MatrixXd& e = batch.eps[c];
    e.resize(b, config_.latent_dim);
    for (int r = 0; r < b; ++r) {
      for (int j = 0; j < config_.latent_dim; ++j) e(r, j) = rng.normal();
    }
  }
}

TrainState::Losses TrainState::loss_and_grads(const Batch& batch, double gamma,
                                              double iin_target_bits,
                                              bool need_encoder_grads) {
  const int b = config_.batch;
  const int d = config_.latent_dim;
  if (batch.x.size() != static_cast<std::size_t>(b) * n_) {
    throw Error("batch size mismatch");
  }

  for (int c = 0; c < n_; ++c) {
    d_mu_[c].setZero();
    d_log_sigma_[c].setZero();
  }
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    for (auto& g : critic_grads_u_[p].weights) g.setZero();
    for (auto& g : critic_grads_u_[p].biases) g.setZero();
    for (auto& g : critic_grads_x_[p].weights) g.setZero();
    for (auto& g : critic_grads_x_[p].biases) g.setZero();
  }

  // Latents by reparameterization, reused by every term.
  std::vector<std::vector<int>>& x_col = x_col_;
  for (int c = 0; c < n_; ++c) {
    const channels::SoftEncoder& enc = encoders_[c];
    u_[c].resize(b, d);
    for (int r = 0; r < b; ++r) {
      const int a = batch.x[static_cast<std::size_t>(r) * n_ + c];
      x_col[c][r] = a;
      for (int j = 0; j < d; ++j) {
        u_[c](r, j) =
            enc.mu(a, j) + std::exp(enc.log_sigma(a, j)) * batch.eps[c](r, j);
      }
    }
  }

  Losses losses;
  losses.pair_loss_nats.resize(pairs_.size());
  losses.pair_bound_bits.resize(pairs_.size());

  // Component information bounds and the transmission constraint.
  double iin_nats = 0.0;
  std::vector<estimators::ComponentBoundEval> bound(n_);
  for (int c = 0; c < n_; ++c) {
    bound[c] = estimators::component_info_bound(encoders_[c], x_col[c],
                                                batch.eps[c],
                                                need_encoder_grads);
    iin_nats += bound[c].bound_nats;
  }
  losses.iin_bits = iin_nats / kLn2;
  const double target_nats = iin_target_bits * kLn2;
  const double gap = iin_nats - target_nats;
  losses.constraint_nats = gamma * std::abs(gap);
  if (need_encoder_grads) {
    const double sgn = gap > 0.0 ? 1.0 : (gap < 0.0 ? -1.0 : 0.0);
    for (int c = 0; c < n_; ++c) {
      d_mu_[c] += gamma * sgn * bound[c].d_mu;
      d_log_sigma_[c] += gamma * sgn * bound[c].d_log_sigma;
    }
  }

  double encoder_nats = losses.constraint_nats;
  double critic_nats = 0.0;
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    const Subset& term = pairs_[p].term;
    const int members = static_cast<int>(term.size());

    Eigen::MatrixXd& u_cat = u_cat_[p];
    u_cat.resize(b, members * d);
    Eigen::MatrixXi& x_active = x_active_[p];
    x_active.resize(b, members);
    int u_off = 0, x_off = 0;
    for (int t = 0; t < members; ++t) {
      const int c = term[t];
      u_cat.middleCols(u_off, d) = u_[c];
      for (int r = 0; r < b; ++r) x_active(r, t) = x_off + x_col[c][r];
      u_off += d;
      x_off += table_->alphabet_sizes()[c];
    }

    // Parameter gradients accumulate straight into the stable buffers the
    // optimizers point at; they were zeroed above.
    const estimators::InfoNceResult result =
        estimators::evaluate_pair_onehot_reuse(pairs_[p], u_cat, x_active,
                                               pair_ws_[p], critic_grads_u_[p],
                                               critic_grads_x_[p]);
    losses.pair_loss_nats[p] = result.loss_nats;
    losses.pair_bound_bits[p] = result.bound_bits;
    critic_nats += result.loss_nats;
    encoder_nats += pair_weight_[p] * result.loss_nats;

    if (need_encoder_grads) {
      const Eigen::MatrixXd& d_u_in = pair_ws_[p].scratch_u.d_input;
      // Chain v_k dL/du through u = mu + exp(log_sigma) * eps.
      u_off = 0;
      for (int t = 0; t < members; ++t) {
        const int c = term[t];
        const channels::SoftEncoder& enc = encoders_[c];
        for (int r = 0; r < b; ++r) {
          const int a = x_col[c][r];
          for (int j = 0; j < d; ++j) {
            const double g = pair_weight_[p] * d_u_in(r, u_off + j);
            d_mu_[c](a, j) += g;
            d_log_sigma_[c](a, j) +=
                g * std::exp(enc.log_sigma(a, j)) * batch.eps[c](r, j);
          }
        }
        u_off += d;
      }
    }
  }

  losses.encoder_nats = encoder_nats;
  losses.critic_nats = critic_nats;
  return losses;
}

std::vector<Eigen::MatrixXd*> TrainState::encoder_params() {
  std::vector<Eigen::MatrixXd*> out;
  for (int c = 0; c < n_; ++c) {
    out.push_back(&encoders_[c].mu);
    out.push_back(&encoders_[c].log_sigma);
  }
  return out;
}

std::vector<const Eigen::MatrixXd*> TrainState::encoder_grads() const {
  std::vector<const Eigen::MatrixXd*> out;
  for (int c = 0; c < n_; ++c) {
    out.push_back(&d_mu_[c]);
    out.push_back(&d_log_sigma_[c]);
  }
  return out;
}

std::vector<Eigen::MatrixXd*> TrainState::critic_params() {
  std::vector<Eigen::MatrixXd*> out;
  for (auto& pair : pairs_) {
    for (auto params : {&pair.critic_u, &pair.critic_x}) {
      for (std::size_t l = 0; l < params->weights.size(); ++l) {
        out.push_back(&params->weights[l]);
        out.push_back(&params->biases[l]);
      }
    }
  }
  return out;
}

std::vector<const Eigen::MatrixXd*> TrainState::critic_grads() const {
  std::vector<const Eigen::MatrixXd*> out;
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    for (const auto* grads : {&critic_grads_u_[p], &critic_grads_x_[p]}) {
      for (std::size_t l = 0; l < grads->weights.size(); ++l) {
        out.push_back(&grads->weights[l]);
        out.push_back(&grads->biases[l]);
      }
    }
  }
  return out;
}

namespace {

/// Per-term scoring plan for the shared-sample evaluation.  Singletons mix
/// over their own alphabet; larger terms mix either over the term marginal
/// or over the full outcome list with the complement's densities removed,
/// whichever enumerates fewer products.
struct TermPlan {
  enum class Route { Singleton, Marginal, FullComplement } route;
  Subset term;
  int component = 0;                // Singleton
  std::vector<double> log_p;        // Singleton: log p_i
  std::vector<int> flat_outcomes;   // Marginal: entries x |term|
  std::vector<double> log_mass;     // Marginal
  Subset complement;                // FullComplement
};

struct EvalShardSums {
  std::vector<double> sum;
  std::vector<double> sum_sq;
};

}  // namespace

EvalResult evaluate(const JointTable& table,
                    const objective::CheckedObjective& objective,
                    const std::vector<channels::SoftEncoder>& encoders,
                    long n_samples, std::uint64_t seed) {
  const int n = table.n_components();
  if (objective.n_components != n) {
    throw Error("objective was validated for a different component count");
  }
  if (static_cast<int>(encoders.size()) != n) {
    throw Error("encoder count does not match component count");
  }
  for (int c = 0; c < n; ++c) {
    if (encoders[c].outcomes() != table.alphabet_sizes()[c]) {
      throw Error("encoder arity does not match component " +
                  std::to_string(c));
    }
  }
  if (n_samples < 2) throw Error("need at least two samples");

  const std::size_t full_entries = table.size();
  std::vector<double> cum(full_entries);
  std::vector<double> log_mass_full(full_entries);
  double running = 0.0;
  for (std::size_t i = 0; i < full_entries; ++i) {
    running += table.masses()[i];
    cum[i] = running;
    log_mass_full[i] = std::log(table.masses()[i]);
  }

  const std::size_t n_terms = objective.terms.size();
  std::vector<TermPlan> plans(n_terms);
  bool need_full_weights = false;
  for (std::size_t k = 0; k < n_terms; ++k) {
    TermPlan& plan = plans[k];
    plan.term = objective.terms[k];
    if (plan.term.size() == 1) {
      plan.route = TermPlan::Route::Singleton;
      plan.component = plan.term[0];
      for (double p : table.component_marginal(plan.component)) {
        plan.log_p.push_back(p > 0.0 ? std::log(p) : -1e300);
      }
      continue;
    }
    const JointTable marg = table.marginal(plan.term);
    const std::size_t size_a = plan.term.size();
    const std::size_t cost_marginal = marg.size() * (size_a + 1);
    const std::size_t cost_full = full_entries * (n - size_a + 1);
    if (cost_marginal <= cost_full) {
      plan.route = TermPlan::Route::Marginal;
      plan.flat_outcomes.reserve(marg.size() * size_a);
      for (const Outcome& o : marg.outcomes()) {
        for (int v : o) plan.flat_outcomes.push_back(v);
      }
      for (double p : marg.masses()) plan.log_mass.push_back(std::log(p));
    } else {
      plan.route = TermPlan::Route::FullComplement;
      need_full_weights = true;
      std::size_t pos = 0;
      for (int c = 0; c < n; ++c) {
        if (pos < plan.term.size() && plan.term[pos] == c) {
          ++pos;
        } else {
          plan.complement.push_back(c);
        }
      }
    }
  }

  // Flat offsets for the per-sample density cache.
  std::vector<int> offset(n + 1, 0);
  for (int c = 0; c < n; ++c) offset[c + 1] = offset[c] + table.alphabet_sizes()[c];
  const int cache_width = offset[n];

  const int d_max = [&] {
    int d = 0;
    for (const auto& enc : encoders) d = std::max(d, enc.dim());
    return d;
  }();

  const std::size_t n_shards =
      static_cast<std::size_t>((n_samples + kEvalShard - 1) / kEvalShard);
  std::vector<EvalShardSums> shard_sums(n_shards);

  parallel_shards(n_shards, [&](std::size_t shard) {
    RngStream rng(derive_seed(seed, "eval-shard", shard));
    const long lo = static_cast<long>(shard) * kEvalShard;
    const long hi = std::min(n_samples, lo + kEvalShard);

    EvalShardSums sums;
    sums.sum.assign(n_terms, 0.0);
    sums.sum_sq.assign(n_terms, 0.0);

    std::vector<double> cache(cache_width);
    std::vector<double> weights(need_full_weights ? full_entries : 0);
    std::vector<double> mix;
    Eigen::VectorXd u_buf(d_max);

    for (long i = lo; i < hi; ++i) {
      const std::size_t j = rng.categorical_from_cumulative(cum);
      const Outcome& x = table.outcomes()[j];

      for (int c = 0; c < n; ++c) {
        const channels::SoftEncoder& enc = encoders[c];
        const int dim = enc.dim();
        const int a = x[c];
        for (int jj = 0; jj < dim; ++jj) {
          u_buf[jj] = enc.mu(a, jj) +
                      std::exp(enc.log_sigma(a, jj)) * rng.normal();
        }
        for (int v = 0; v < enc.outcomes(); ++v) {
          double s = 0.0;
          for (int jj = 0; jj < dim; ++jj) {
            const double ls = enc.log_sigma(v, jj);
            const double z = (u_buf[jj] - enc.mu(v, jj)) * std::exp(-ls);
            s += -0.5 * z * z - ls - kHalfLog2Pi;
          }
          cache[offset[c] + v] = s;
        }
      }

      if (need_full_weights) {
        for (std::size_t e = 0; e < full_entries; ++e) {
          double w = log_mass_full[e];
          const Outcome& xe = table.outcomes()[e];
          for (int c = 0; c < n; ++c) w += cache[offset[c] + xe[c]];
          weights[e] = w;
        }
      }

      for (std::size_t k = 0; k < n_terms; ++k) {
        const TermPlan& plan = plans[k];
        double value;
        if (plan.route == TermPlan::Route::Singleton) {
          const int c = plan.component;
          const int m = table.alphabet_sizes()[c];
          mix.resize(m);
          for (int v = 0; v < m; ++v) {
            mix[v] = plan.log_p[v] + cache[offset[c] + v];
          }
          value = cache[offset[c] + x[c]] - logsumexp(mix);
        } else if (plan.route == TermPlan::Route::Marginal) {
          const std::size_t entries = plan.log_mass.size();
          const std::size_t size_a = plan.term.size();
          mix.resize(entries);
          double num = 0.0;
          for (std::size_t t = 0; t < size_a; ++t) {
            num += cache[offset[plan.term[t]] + x[plan.term[t]]];
          }
          for (std::size_t e = 0; e < entries; ++e) {
            double w = plan.log_mass[e];
            const int* row = &plan.flat_outcomes[e * size_a];
            for (std::size_t t = 0; t < size_a; ++t) {
              w += cache[offset[plan.term[t]] + row[t]];
            }
            mix[e] = w;
          }
          value = num - logsumexp(mix);
        } else {
          double num = 0.0;
          for (int c : plan.term) num += cache[offset[c] + x[c]];
          mix.resize(full_entries);
          for (std::size_t e = 0; e < full_entries; ++e) {
            double w = weights[e];
            const Outcome& xe = table.outcomes()[e];
            for (int c : plan.complement) w -= cache[offset[c] + xe[c]];
            mix[e] = w;
          }
          value = num - logsumexp(mix);
        }
        const double bits = value / kLn2;
        sums.sum[k] += bits;
        sums.sum_sq[k] += bits * bits;
      }
    }
    shard_sums[shard] = std::move(sums);
  });

  EvalResult result;
  result.terms.resize(n_terms);
  const double count = static_cast<double>(n_samples);
  for (std::size_t k = 0; k < n_terms; ++k) {
    NeumaierAccumulator sum, sum_sq;
    for (const EvalShardSums& s : shard_sums) {
      sum.add(s.sum[k]);
      sum_sq.add(s.sum_sq[k]);
    }
    const double mean = sum.total() / count;
    const double var =
        std::max(0.0, (sum_sq.total() - count * mean * mean) / (count - 1.0));
    result.terms[k] = {objective.terms[k], mean, std::sqrt(var / count)};
  }

  double iin = 0.0, iin_var = 0.0;
  for (int c = 0; c < n; ++c) {
    iin += result.terms[c].bits;
    iin_var += result.terms[c].se_bits * result.terms[c].se_bits;
  }
  result.iin_bits = iin;
  result.iin_se_bits = std::sqrt(iin_var);

  double q = 0.0, q_var = 0.0;
  for (std::size_t k = 0; k < n_terms; ++k) {
    const double w = objective.quantity_weights[k];
    q += w * result.terms[k].bits;
    q_var += w * w * result.terms[k].se_bits * result.terms[k].se_bits;
  }
  result.quantity_bits = q;
  result.quantity_se_bits = std::sqrt(q_var);
  return result;
}

namespace {

struct TrainOutcome {
  std::vector<channels::SoftEncoder> final_encoders;
  std::vector<ScanRecord> snapshots;  // scan mode only (eval filled later)
  long steps_run = 0;
};

TrainOutcome train_loop(const JointTable& table,
                        const objective::CheckedObjective& objective,
                        const TrainConfig& config, bool scan_mode) {
  TrainState state(table, objective, config);
  RngStream train_rng(derive_seed(config.seed, "train"));

  nn::Sgd encoder_opt(config.encoder_lr);
  nn::Adam critic_opt(config.critic_lr, config.adam_beta1, config.adam_beta2,
                      config.adam_eps);
  const auto enc_params = state.encoder_params();
  const auto enc_grads = state.encoder_grads();
  const auto critic_params = state.critic_params();
  const auto critic_grads = state.critic_grads();

  const double sum_h = state.total_component_entropy_bits();
  std::vector<long> checkpoint_steps;
  if (scan_mode) {
    for (int j = 1; j <= config.checkpoints; ++j) {
      long t = std::llround(static_cast<double>(j) *
                            static_cast<double>(config.steps) /
                            static_cast<double>(config.checkpoints));
      t = std::clamp(t, 1L, config.steps);
      if (checkpoint_steps.empty() || t > checkpoint_steps.back()) {
        checkpoint_steps.push_back(t);
      }
    }
    if (checkpoint_steps.empty() || checkpoint_steps.back() != config.steps) {
      checkpoint_steps.push_back(config.steps);
    }
  }

  TrainOutcome outcome;
  long guard_count = 0;
  std::size_t next_checkpoint = 0;
  double target = objective.iin_bits;
  TrainState::Batch batch;
  for (long t = 1; t <= config.steps; ++t) {
    if (scan_mode) {
      target = sum_h * static_cast<double>(t) /
               static_cast<double>(config.steps);
    }
    const double gamma = gamma_at(config.gamma, t, config.steps);
    state.sample_batch_into(batch, train_rng);
    const TrainState::Losses losses =
        state.loss_and_grads(batch, gamma, target, true);

    if (!std::isfinite(losses.encoder_nats) ||
        !std::isfinite(losses.critic_nats)) {
      throw DivergenceError("non-finite loss at step " + std::to_string(t), t);
    }
    if (std::abs(losses.iin_bits - target) >
        sum_h + config.guard_slack_bits) {
      if (++guard_count >= config.guard_patience) {
        throw DivergenceError(
            "information constraint unreachable for " +
                std::to_string(guard_count) + " steps at step " +
                std::to_string(t),
            t);
      }
    } else {
      guard_count = 0;
    }

    critic_opt.step(critic_params, critic_grads);
    encoder_opt.step(enc_params, enc_grads);

    if (scan_mode && next_checkpoint < checkpoint_steps.size() &&
        t == checkpoint_steps[next_checkpoint]) {
      ScanRecord record;
      record.step = t;
      record.iin_target_bits = target;
      record.encoders = state.encoders();
      outcome.snapshots.push_back(std::move(record));
      ++next_checkpoint;
    }
  }

  const double final_gamma =
      gamma_at(config.gamma, config.steps, config.steps);
  for (long e = 0; e < config.extra_critic_steps; ++e) {
    state.sample_batch_into(batch, train_rng);
    const TrainState::Losses losses =
        state.loss_and_grads(batch, final_gamma, target, false);
    if (!std::isfinite(losses.critic_nats)) {
      throw DivergenceError(
          "non-finite critic loss during refinement step " +
              std::to_string(e + 1),
          config.steps + e + 1);
    }
    critic_opt.step(critic_params, critic_grads);
  }

  outcome.final_encoders = state.encoders();
  outcome.steps_run = config.steps + config.extra_critic_steps;
  return outcome;
}

}  // namespace

RunResult run_point(const JointTable& table,
                    const objective::CheckedObjective& objective,
                    const TrainConfig& config) {
  TrainOutcome outcome = train_loop(table, objective, config, false);
  RunResult result;
  result.encoders = std::move(outcome.final_encoders);
  result.iin_target_bits = objective.iin_bits;
  result.steps_run = outcome.steps_run;
  result.eval = evaluate(table, objective, result.encoders,
                         config.eval_samples, derive_seed(config.seed, "eval"));
  return result;
}

ScanResult run_scan(const JointTable& table,
                    const objective::CheckedObjective& objective,
                    const TrainConfig& config) {
  TrainOutcome outcome = train_loop(table, objective, config, true);
  ScanResult result;
  result.records = std::move(outcome.snapshots);
  for (std::size_t j = 0; j < result.records.size(); ++j) {
    ScanRecord& record = result.records[j];
    record.eval = evaluate(table, objective, record.encoders,
                           config.eval_samples,
                           derive_seed(config.seed, "eval", j));
  }
  return result;
}

namespace {

bool improves(double candidate, double incumbent,
              objective::Direction direction) {
  return direction == objective::Direction::Maximize
             ? candidate > incumbent
             : candidate < incumbent;
}

}  // namespace

BestOfPoints best_of_points(const JointTable& table,
                            const objective::CheckedObjective& objective,
                            const TrainConfig& config, int repeats) {
  if (repeats < 1) throw Error("repeats must be positive");
  BestOfPoints best;
  for (int r = 0; r < repeats; ++r) {
    TrainConfig cfg = config;
    cfg.seed = derive_seed(config.seed, "repeat", r);
    RunResult result = run_point(table, objective, cfg);
    best.quantities_bits.push_back(result.eval.quantity_bits);
    if (r == 0 || improves(result.eval.quantity_bits,
                           best.best.eval.quantity_bits,
                           objective.direction)) {
      best.best = std::move(result);
      best.chosen = r;
    }
  }
  return best;
}

BestOfScans best_of_scans(const JointTable& table,
                          const objective::CheckedObjective& objective,
                          const TrainConfig& config, int repeats) {
  if (repeats < 1) throw Error("repeats must be positive");
  BestOfScans best;
  double best_extreme = 0.0;
  for (int r = 0; r < repeats; ++r) {
    TrainConfig cfg = config;
    cfg.seed = derive_seed(config.seed, "repeat", r);
    ScanResult result = run_scan(table, objective, cfg);
    double extreme = 0.0;
    for (std::size_t i = 0; i < result.records.size(); ++i) {
      const double q = result.records[i].eval.quantity_bits;
      if (i == 0 || improves(q, extreme, objective.direction)) extreme = q;
    }
    best.quantities_bits.push_back(extreme);
    if (r == 0 || improves(extreme, best_extreme, objective.direction)) {
      best.best = std::move(result);
      best.chosen = r;
      best_extreme = extreme;
    }
  }
  return best;
}

}  // namespace descspace::trainer
