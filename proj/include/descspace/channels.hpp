#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <variant>
#include <vector>

#include "descspace/rng.hpp"
#include "descspace/table.hpp"

namespace descspace::channels {

/// Stochastic encoder with one diagonal Gaussian per source outcome.
/// Row a of mu / log_sigma parameterizes q(u | x = a) on R^dim.
struct SoftEncoder {
  Eigen::MatrixXd mu;         // outcomes x dim
  Eigen::MatrixXd log_sigma;  // outcomes x dim

  int outcomes() const { return static_cast<int>(mu.rows()); }
  int dim() const { return static_cast<int>(mu.cols()); }
};

/// Deterministic partition channel: outcome a maps to cluster labels[a].
struct HardChannel {
  std::vector<int> labels;

  int outcomes() const { return static_cast<int>(labels.size()); }
  int clusters() const;
};

/// Binary symmetric channel with the given flip probability.
struct BscChannel {
  double flip_probability = 0.0;
};

using ComponentChannel = std::variant<SoftEncoder, HardChannel, BscChannel>;

/// One channel per system component.
using Description = std::vector<ComponentChannel>;

/// Row-stochastic transition matrix form shared by the discrete channels.
struct DiscreteChannel {
  Eigen::MatrixXd q;  // in_arity x out_arity

  int in_arity() const { return static_cast<int>(q.rows()); }
  int out_arity() const { return static_cast<int>(q.cols()); }
};

DiscreteChannel to_discrete(const HardChannel& channel);
DiscreteChannel to_discrete(const BscChannel& channel);

/// Draws u ~ q(. | x = a) by reparameterization.
Eigen::VectorXd sample(const SoftEncoder& enc, int a, RngStream& rng);

/// log q(u | x = a), natural log.
double log_conditional(const SoftEncoder& enc, const Eigen::VectorXd& u,
                       int a);

/// log q(u | x = a) for every a at once; cheaper than repeated calls.
Eigen::VectorXd log_conditional_all(const SoftEncoder& enc,
                                    const Eigen::VectorXd& u);

/// log Σ_a p(a) q(u | a), natural log.  `input_marginal` is the source
/// distribution of this component.
double log_marginal(const SoftEncoder& enc, const Eigen::VectorXd& u,
                    const std::vector<double>& input_marginal);

struct McEstimate {
  double bits = 0.0;
  double se_bits = 0.0;
  long n = 0;
};

/// Monte Carlo estimate of I(U_S ; X_S) for the subset S of a description.
/// Samples x_S from the table's marginal and u_S from the channels, then
/// averages log2 q(u_S | x_S) - log2 p(u_S) where p(u_S) mixes the channel
/// densities over the marginal's outcomes.  Sharded so the estimate is
/// identical for any thread count; the standard error is the sample standard
/// deviation over sqrt(n).
McEstimate mc_mutual_information(const Description& description,
                                 const JointTable& table, const Subset& subset,
                                 long n_samples, std::uint64_t seed);

/// Single-channel convenience overload over an explicit input marginal.
McEstimate mc_mutual_information(const ComponentChannel& channel,
                                 const std::vector<double>& input_marginal,
                                 long n_samples, std::uint64_t seed);

/// Exact I(U ; X) in bits for a binary symmetric channel: H(U) - h(e).
double bsc_exact_mi(const BscChannel& channel,
                    const std::vector<double>& input_marginal);

/// Bhattacharyya coefficient between the Gaussians of outcomes a and b.
/// 1 means indistinguishable, 0 means fully separated.
double bhattacharyya_coefficient(const SoftEncoder& enc, int a, int b);

struct HardenConfig {
  double step = 1e-2;
  long max_steps = 10000;
  double tol = 1e-3;
};

/// Outcome pair whose coefficient contradicted the transitive closure of the
/// "same cluster" relation; the closure wins and the pair is reported.
struct MergeConflict {
  int component = 0;
  int outcome_a = 0;
  int outcome_b = 0;
  double coefficient = 0.0;
};

struct HardenOutcome {
  std::vector<HardChannel> channels;
  long steps = 0;
  double worst_residual = 0.0;  // max over pairs of min(BC, 1 - BC)
  std::vector<MergeConflict> conflicts;
};

/// Polarizes soft encoders by gradient descent on Σ min(BC, 1 - BC) over all
/// outcome pairs, then clusters outcomes whose coefficients converged to 1.
/// Inputs that are already polarized within tol take zero descent steps.
/// Throws HardenError if some pair is still ambiguous after max_steps.
HardenOutcome harden(std::vector<SoftEncoder> encoders,
                     const HardenConfig& config = {});

}  // namespace descspace::channels
