#include "descspace/channels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "descspace/errors.hpp"
#include "descspace/numeric.hpp"
#include "descspace/parallel.hpp"

namespace descspace::channels {

namespace {

constexpr long kMcShard = 4096;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int channel_arity(const ComponentChannel& channel) {
  if (const auto* soft = std::get_if<SoftEncoder>(&channel)) {
    return soft->outcomes();
  }
  if (const auto* hard = std::get_if<HardChannel>(&channel)) {
    return hard->outcomes();
  }
  return 2;
}

}  // namespace

int HardChannel::clusters() const {
  int top = -1;
  for (int label : labels) top = std::max(top, label);
  return top + 1;
}

DiscreteChannel to_discrete(const HardChannel& channel) {
  const int in = channel.outcomes();
  if (in == 0) throw Error("hard channel has no outcomes");
  const int out = channel.clusters();
  for (int label : channel.labels) {
    if (label < 0 || label >= out) throw Error("hard channel label out of range");
  }
  DiscreteChannel d;
  d.q = Eigen::MatrixXd::Zero(in, out);
  for (int a = 0; a < in; ++a) d.q(a, channel.labels[a]) = 1.0;
  return d;
}

DiscreteChannel to_discrete(const BscChannel& channel) {
  const double e = channel.flip_probability;
  if (!(e >= 0.0 && e <= 1.0)) throw Error("flip probability must lie in [0, 1]");
  DiscreteChannel d;
  d.q = Eigen::MatrixXd(2, 2);
  d.q << 1.0 - e, e, e, 1.0 - e;
  return d;
}

Eigen::VectorXd sample(const SoftEncoder& enc, int a, RngStream& rng) {
  if (a < 0 || a >= enc.outcomes()) throw Error("encoder outcome out of range");
  Eigen::VectorXd u(enc.dim());
  for (int j = 0; j < enc.dim(); ++j) {
    u[j] = enc.mu(a, j) + std::exp(enc.log_sigma(a, j)) * rng.normal();
  }
  return u;
}

double log_conditional(const SoftEncoder& enc, const Eigen::VectorXd& u,
                       int a) {
  if (a < 0 || a >= enc.outcomes()) throw Error("encoder outcome out of range");
  if (u.size() != enc.dim()) throw Error("latent dimension mismatch");
  double lp = 0.0;
  for (int j = 0; j < enc.dim(); ++j) {
    const double ls = enc.log_sigma(a, j);
    const double z = (u[j] - enc.mu(a, j)) * std::exp(-ls);
    lp += -0.5 * z * z - ls - kHalfLog2Pi;
  }
  return lp;
}

Eigen::VectorXd log_conditional_all(const SoftEncoder& enc,
                                    const Eigen::VectorXd& u) {
  if (u.size() != enc.dim()) throw Error("latent dimension mismatch");
  Eigen::VectorXd lp(enc.outcomes());
  for (int a = 0; a < enc.outcomes(); ++a) {
    double s = 0.0;
    for (int j = 0; j < enc.dim(); ++j) {
      const double ls = enc.log_sigma(a, j);
      const double z = (u[j] - enc.mu(a, j)) * std::exp(-ls);
      s += -0.5 * z * z - ls - kHalfLog2Pi;
    }
    lp[a] = s;
  }
  return lp;
}

double log_marginal(const SoftEncoder& enc, const Eigen::VectorXd& u,
                    const std::vector<double>& input_marginal) {
  if (static_cast<int>(input_marginal.size()) != enc.outcomes()) {
    throw Error("input marginal arity mismatch");
  }
  const Eigen::VectorXd lp = log_conditional_all(enc, u);
  std::vector<double> terms;
  terms.reserve(input_marginal.size());
  for (int a = 0; a < enc.outcomes(); ++a) {
    if (input_marginal[a] <= 0.0) continue;
    terms.push_back(std::log(input_marginal[a]) + lp[a]);
  }
  if (terms.empty()) throw Error("input marginal has no mass");
  return logsumexp(terms);
}

namespace {

/// Per-sample log densities log q_t(u_t | v) for every source value v of one
/// component, natural log.
void discrete_log_density(const DiscreteChannel& d, int u,
                          std::vector<double>& out) {
  out.resize(d.in_arity());
  for (int v = 0; v < d.in_arity(); ++v) {
    const double q = d.q(v, u);
    out[v] = q > 0.0 ? std::log(q) : kNegInf;
  }
}

struct ShardMoments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

}  // namespace

McEstimate mc_mutual_information(const Description& description,
                                 const JointTable& table, const Subset& subset,
                                 long n_samples, std::uint64_t seed) {
  table.validate_subset(subset);
  if (description.size() != static_cast<std::size_t>(table.n_components())) {
    throw Error("description size does not match component count");
  }
  if (n_samples < 2) throw Error("need at least two samples");
  for (int c : subset) {
    if (channel_arity(description[c]) != table.alphabet_sizes()[c]) {
      throw Error("channel arity does not match component " +
                  std::to_string(c));
    }
  }
  if (subset.empty()) return {0.0, 0.0, n_samples};

  const JointTable marg = table.marginal(subset);
  const std::size_t states = marg.size();
  const int k = static_cast<int>(subset.size());

  std::vector<double> cum(states);
  std::vector<double> log_mass(states);
  double running = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    running += marg.masses()[s];
    cum[s] = running;
    log_mass[s] = std::log(marg.masses()[s]);
  }

  // Per-position dispatch tables; soft encoders keep their Gaussian form,
  // discrete channels carry a transition matrix and whether sampling needs a
  // random draw.
  enum class Kind { Soft, Hard, Bsc };
  std::vector<Kind> kind(k);
  std::vector<const SoftEncoder*> soft(k, nullptr);
  std::vector<const HardChannel*> hard(k, nullptr);
  std::vector<DiscreteChannel> discrete(k);
  for (int t = 0; t < k; ++t) {
    const ComponentChannel& ch = description[subset[t]];
    if (const auto* enc = std::get_if<SoftEncoder>(&ch)) {
      kind[t] = Kind::Soft;
      soft[t] = enc;
    } else if (const auto* h = std::get_if<HardChannel>(&ch)) {
      kind[t] = Kind::Hard;
      hard[t] = h;
      discrete[t] = to_discrete(*h);
    } else {
      kind[t] = Kind::Bsc;
      discrete[t] = to_discrete(std::get<BscChannel>(ch));
    }
  }

  const std::size_t n_shards =
      static_cast<std::size_t>((n_samples + kMcShard - 1) / kMcShard);
  std::vector<ShardMoments> moments(n_shards);

  parallel_shards(n_shards, [&](std::size_t shard) {
    RngStream rng(derive_seed(seed, "mc-mi-shard", shard));
    const long lo = static_cast<long>(shard) * kMcShard;
    const long hi = std::min(n_samples, lo + kMcShard);
    std::vector<std::vector<double>> lq(k);
    std::vector<double> mix(states);
    Eigen::VectorXd u;
    ShardMoments m;
    for (long i = lo; i < hi; ++i) {
      const std::size_t j = rng.categorical_from_cumulative(cum);
      const Outcome& x = marg.outcomes()[j];
      double log_cond = 0.0;
      for (int t = 0; t < k; ++t) {
        if (kind[t] == Kind::Soft) {
          u.resize(soft[t]->dim());
          const int a = x[t];
          for (int dctr = 0; dctr < soft[t]->dim(); ++dctr) {
            u[dctr] = soft[t]->mu(a, dctr) +
                      std::exp(soft[t]->log_sigma(a, dctr)) * rng.normal();
          }
          const Eigen::VectorXd all = log_conditional_all(*soft[t], u);
          lq[t].assign(all.data(), all.data() + all.size());
          log_cond += all[a];
        } else {
          const DiscreteChannel& d = discrete[t];
          int out;
          if (kind[t] == Kind::Hard) {
            out = hard[t]->labels[x[t]];
          } else {
            const double r = rng.uniform01();
            double acc = 0.0;
            out = d.out_arity() - 1;
            for (int v = 0; v < d.out_arity(); ++v) {
              acc += d.q(x[t], v);
              if (r < acc) {
                out = v;
                break;
              }
            }
          }
          discrete_log_density(d, out, lq[t]);
          log_cond += lq[t][x[t]];
        }
      }
      for (std::size_t s = 0; s < states; ++s) {
        double v = log_mass[s];
        const Outcome& xs = marg.outcomes()[s];
        for (int t = 0; t < k; ++t) v += lq[t][xs[t]];
        mix[s] = v;
      }
      const double value = (log_cond - logsumexp(mix)) / kLn2;
      m.sum += value;
      m.sum_sq += value * value;
    }
    moments[shard] = m;
  });

  NeumaierAccumulator sum, sum_sq;
  for (const ShardMoments& m : moments) {
    sum.add(m.sum);
    sum_sq.add(m.sum_sq);
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum.total() / n;
  const double var =
      std::max(0.0, (sum_sq.total() - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n), n_samples};
}

McEstimate mc_mutual_information(const ComponentChannel& channel,
                                 const std::vector<double>& input_marginal,
                                 long n_samples, std::uint64_t seed) {
  std::vector<Outcome> outcomes;
  std::vector<double> masses;
  for (std::size_t a = 0; a < input_marginal.size(); ++a) {
    outcomes.push_back({static_cast<int>(a)});
    masses.push_back(input_marginal[a]);
  }
  const JointTable table({static_cast<int>(input_marginal.size())},
                         std::move(outcomes), std::move(masses));
  return mc_mutual_information(Description{channel}, table, {0}, n_samples,
                               seed);
}

double bsc_exact_mi(const BscChannel& channel,
                    const std::vector<double>& input_marginal) {
  if (input_marginal.size() != 2) throw Error("binary channel needs a binary input");
  const double e = channel.flip_probability;
  if (!(e >= 0.0 && e <= 1.0)) throw Error("flip probability must lie in [0, 1]");
  const double p1 = input_marginal[1];
  const double q1 = p1 * (1.0 - e) + (1.0 - p1) * e;
  return binary_entropy_bits(q1) - binary_entropy_bits(e);
}

double bhattacharyya_coefficient(const SoftEncoder& enc, int a, int b) {
  if (a < 0 || a >= enc.outcomes() || b < 0 || b >= enc.outcomes()) {
    throw Error("encoder outcome out of range");
  }
  double distance = 0.0;
  for (int j = 0; j < enc.dim(); ++j) {
    const double va = std::exp(2.0 * enc.log_sigma(a, j));
    const double vb = std::exp(2.0 * enc.log_sigma(b, j));
    const double bar = 0.5 * (va + vb);
    const double delta = enc.mu(a, j) - enc.mu(b, j);
    distance += delta * delta / (8.0 * bar) + 0.5 * std::log(bar / std::sqrt(va * vb));
  }
  return std::exp(-distance);
}

namespace {

struct PairGrad {
  // d(loss)/d(mu), d(loss)/d(log_sigma) accumulated per encoder.
  Eigen::MatrixXd mu;
  Eigen::MatrixXd log_sigma;
};

/// Adds the gradient of min(BC, 1 - BC) for one outcome pair.
void accumulate_pair(const SoftEncoder& enc, int a, int b, PairGrad& grad) {
  const int dim = enc.dim();
  const double bc = bhattacharyya_coefficient(enc, a, b);
  const double sign = bc < 0.5 ? 1.0 : -1.0;  // descend toward 0 or 1
  // d(bc)/d(theta) = -bc * d(distance)/d(theta)
  for (int j = 0; j < dim; ++j) {
    const double va = std::exp(2.0 * enc.log_sigma(a, j));
    const double vb = std::exp(2.0 * enc.log_sigma(b, j));
    const double bar = 0.5 * (va + vb);
    const double delta = enc.mu(a, j) - enc.mu(b, j);

    const double d_mu = delta / (4.0 * bar);
    // d(distance)/d(va) then chain through va = exp(2 log_sigma_a).
    const double d_va =
        -delta * delta / (16.0 * bar * bar) + 0.5 * (0.5 / bar - 0.5 / va);
    const double d_vb =
        -delta * delta / (16.0 * bar * bar) + 0.5 * (0.5 / bar - 0.5 / vb);

    const double scale = sign * (-bc);
    grad.mu(a, j) += scale * d_mu;
    grad.mu(b, j) += scale * -d_mu;
    grad.log_sigma(a, j) += scale * d_va * 2.0 * va;
    grad.log_sigma(b, j) += scale * d_vb * 2.0 * vb;
  }
}

double worst_pair_residual(const std::vector<SoftEncoder>& encoders,
                           MergeConflict* worst) {
  double residual = 0.0;
  for (std::size_t c = 0; c < encoders.size(); ++c) {
    const SoftEncoder& enc = encoders[c];
    for (int a = 0; a < enc.outcomes(); ++a) {
      for (int b = a + 1; b < enc.outcomes(); ++b) {
        const double bc = bhattacharyya_coefficient(enc, a, b);
        const double r = std::min(bc, 1.0 - bc);
        if (r > residual) {
          residual = r;
          if (worst) *worst = {static_cast<int>(c), a, b, bc};
        }
      }
    }
  }
  return residual;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

HardenOutcome harden(std::vector<SoftEncoder> encoders,
                     const HardenConfig& config) {
  if (!(config.step > 0.0) || config.max_steps < 0 || !(config.tol > 0.0)) {
    throw Error("invalid hardening configuration");
  }
  HardenOutcome out;
  MergeConflict worst;

  long step_count = 0;
  double residual = worst_pair_residual(encoders, &worst);
  while (residual > config.tol && step_count < config.max_steps) {
    for (SoftEncoder& enc : encoders) {
      if (enc.outcomes() < 2) continue;
      PairGrad grad;
      grad.mu = Eigen::MatrixXd::Zero(enc.outcomes(), enc.dim());
      grad.log_sigma = Eigen::MatrixXd::Zero(enc.outcomes(), enc.dim());
      for (int a = 0; a < enc.outcomes(); ++a) {
        for (int b = a + 1; b < enc.outcomes(); ++b) {
          accumulate_pair(enc, a, b, grad);
        }
      }
      enc.mu -= config.step * grad.mu;
      enc.log_sigma -= config.step * grad.log_sigma;
    }
    ++step_count;
    residual = worst_pair_residual(encoders, &worst);
  }
  if (residual > config.tol) {
    throw HardenError("hardening left component " +
                          std::to_string(worst.component) + " pair (" +
                          std::to_string(worst.outcome_a) + ", " +
                          std::to_string(worst.outcome_b) +
                          ") at coefficient " +
                          std::to_string(worst.coefficient),
                      worst.component, worst.outcome_a, worst.outcome_b,
                      worst.coefficient);
  }

  out.steps = step_count;
  out.worst_residual = residual;
  for (std::size_t c = 0; c < encoders.size(); ++c) {
    const SoftEncoder& enc = encoders[c];
    const int m = enc.outcomes();
    UnionFind uf(m);
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        if (bhattacharyya_coefficient(enc, a, b) > 0.5) uf.unite(a, b);
      }
    }
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        const double bc = bhattacharyya_coefficient(enc, a, b);
        if (bc <= 0.5 && uf.find(a) == uf.find(b)) {
          out.conflicts.push_back({static_cast<int>(c), a, b, bc});
        }
      }
    }
    HardChannel hard;
    hard.labels.resize(m);
    std::vector<int> label_of_root(m, -1);
    int next = 0;
    for (int a = 0; a < m; ++a) {
      const int root = uf.find(a);
      if (label_of_root[root] < 0) label_of_root[root] = next++;
      hard.labels[a] = label_of_root[root];
    }
    out.channels.push_back(std::move(hard));
  }
  return out;
}

}  // namespace descspace::channels
