#include "descspace/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "descspace/channels.hpp"
#include "descspace/errors.hpp"
#include "descspace/infotheory.hpp"
#include "descspace/numeric.hpp"
#include "descspace/parallel.hpp"
#include "descspace/rng.hpp"

namespace descspace::sampling {

namespace {

constexpr int kMaxPartitionElements = 8;
constexpr long kDrawShard = 1L << 20;
constexpr std::uint64_t kAbortCheckDraws = 10000000;
constexpr double kMinAcceptanceRate = 1e-6;

double o_bits_or_zero(const JointTable& joint) {
  // Ω is identically zero below three components.
  if (joint.n_components() < 3) return 0.0;
  return infotheory::o_information(joint);
}

double partition_entropy_bits(const Partition& partition,
                              const std::vector<double>& marginal) {
  int clusters = 0;
  for (int label : partition) clusters = std::max(clusters, label + 1);
  std::vector<double> mass(clusters, 0.0);
  for (std::size_t a = 0; a < partition.size(); ++a) {
    mass[partition[a]] += marginal[a];
  }
  NeumaierAccumulator h;
  for (double q : mass) {
    if (q > 0.0) h.add(-q * std::log2(q));
  }
  return h.total();
}

}  // namespace

std::uint64_t bell_number(int m) {
  static constexpr std::uint64_t kBell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140};
  if (m < 0 || m > kMaxPartitionElements) {
    throw Error("partition enumeration supports 0..8 elements, got " +
                std::to_string(m));
  }
  return kBell[m];
}

std::vector<Partition> enumerate_partitions(int m) {
  bell_number(m);  // bounds check
  std::vector<Partition> out;
  out.reserve(bell_number(m));
  Partition labels(m, 0);
  // Iterative restricted-growth enumeration: position i may take any label
  // up to one past the maximum used before it.
  std::vector<int> cap(m + 1, 0);
  int i = 0;
  while (true) {
    if (i == m) {
      out.push_back(labels);
      --i;
      while (i >= 0 && labels[i] == cap[i]) --i;
      if (i < 0) break;
      ++labels[i];
      cap[i + 1] = std::max(cap[i], labels[i] + 1);
      ++i;
      continue;
    }
    labels[i] = 0;
    cap[i + 1] = std::max(cap[i], 1);
    ++i;
  }
  if (m == 0) out.assign(1, Partition{});
  return out;
}

std::vector<BscSurveyPoint> random_bsc_survey(const JointTable& table,
                                              long n_draws,
                                              std::uint64_t seed) {
  const int n = table.n_components();
  for (int c = 0; c < n; ++c) {
    if (table.alphabet_sizes()[c] != 2) {
      throw Error("binary symmetric survey requires binary components");
    }
  }
  if (n_draws < 0) throw Error("n_draws must be non-negative");

  std::vector<std::vector<double>> marginals;
  for (int c = 0; c < n; ++c) marginals.push_back(table.component_marginal(c));

  constexpr long kShard = 256;
  const std::size_t n_shards =
      static_cast<std::size_t>((n_draws + kShard - 1) / kShard);
  std::vector<BscSurveyPoint> out(static_cast<std::size_t>(n_draws));

  parallel_shards(n_shards, [&](std::size_t shard) {
    RngStream rng(derive_seed(seed, "bsc-shard", shard));
    const long lo = static_cast<long>(shard) * kShard;
    const long hi = std::min(n_draws, lo + kShard);
    for (long i = lo; i < hi; ++i) {
      BscSurveyPoint point;
      point.flip.resize(n);
      std::vector<channels::DiscreteChannel> description;
      description.reserve(n);
      NeumaierAccumulator sum_info;
      for (int c = 0; c < n; ++c) {
        channels::BscChannel channel{rng.uniform(0.0, 0.5)};
        point.flip[c] = channel.flip_probability;
        sum_info.add(channels::bsc_exact_mi(channel, marginals[c]));
        description.push_back(channels::to_discrete(channel));
      }
      point.sum_info_bits = sum_info.total();
      const JointTable joint = infotheory::description_joint(table, description);
      point.tc_bits = infotheory::total_correlation(joint);
      point.o_bits = o_bits_or_zero(joint);
      out[static_cast<std::size_t>(i)] = std::move(point);
    }
  });
  return out;
}

namespace {

struct ShardAccepts {
  std::vector<HardSample> samples;
  std::vector<long> position;  // 1-based draw index within the shard
  long draws = 0;
};

}  // namespace

HardSampleResult rejection_sample_hard(const JointTable& table,
                                       const InformationBand& band,
                                       long n_accepted, std::uint64_t seed) {
  if (!(band.lo_bits <= band.hi_bits)) {
    throw Error("information band requires lo <= hi");
  }
  if (n_accepted < 1) throw Error("n_accepted must be positive");

  const int n = table.n_components();
  std::vector<std::vector<Partition>> partitions(n);
  std::vector<std::vector<double>> entropy_bits(n);
  std::vector<std::uint64_t> counts(n);
  for (int c = 0; c < n; ++c) {
    partitions[c] = enumerate_partitions(table.alphabet_sizes()[c]);
    counts[c] = partitions[c].size();
    const std::vector<double> marginal = table.component_marginal(c);
    entropy_bits[c].reserve(counts[c]);
    for (const Partition& p : partitions[c]) {
      entropy_bits[c].push_back(partition_entropy_bits(p, marginal));
    }
  }

  const auto evaluate = [&](const std::vector<int>& choice) {
    HardSample sample;
    sample.partition_index = choice;
    NeumaierAccumulator sum_info;
    std::vector<channels::DiscreteChannel> description;
    description.reserve(n);
    for (int c = 0; c < n; ++c) {
      sum_info.add(entropy_bits[c][choice[c]]);
      description.push_back(
          channels::to_discrete(channels::HardChannel{partitions[c][choice[c]]}));
    }
    sample.sum_info_bits = sum_info.total();
    const JointTable joint = infotheory::description_joint(table, description);
    sample.tc_bits = infotheory::total_correlation(joint);
    sample.o_bits = o_bits_or_zero(joint);
    return sample;
  };

  HardSampleResult result;
  std::uint64_t merged_draws = 0;
  std::uint64_t next_abort_check = kAbortCheckDraws;
  const std::size_t wave_width = max_threads();
  std::size_t next_shard = 0;
  bool done = false;

  while (!done) {
    std::vector<ShardAccepts> wave(wave_width);
    parallel_shards(wave_width, [&](std::size_t slot) {
      RngStream rng(derive_seed(seed, "hard-shard", next_shard + slot));
      ShardAccepts accepts;
      std::vector<int> choice(n);
      for (long i = 1; i <= kDrawShard; ++i) {
        double sum = 0.0;
        for (int c = 0; c < n; ++c) {
          const int idx = static_cast<int>(rng.uniform_index(counts[c]));
          choice[c] = idx;
          sum += entropy_bits[c][idx];
        }
        if (sum >= band.lo_bits && sum <= band.hi_bits) {
          accepts.samples.push_back(evaluate(choice));
          accepts.position.push_back(i);
          if (static_cast<long>(accepts.samples.size()) >= n_accepted) {
            accepts.draws = i;
            break;
          }
        }
      }
      if (accepts.draws == 0) accepts.draws = kDrawShard;
      wave[slot] = std::move(accepts);
    });
    next_shard += wave_width;

    for (ShardAccepts& shard : wave) {
      const std::uint64_t shard_base = merged_draws;
      for (std::size_t j = 0; j < shard.samples.size(); ++j) {
        result.samples.push_back(std::move(shard.samples[j]));
        if (static_cast<long>(result.samples.size()) == n_accepted) {
          result.draws = shard_base + static_cast<std::uint64_t>(shard.position[j]);
          done = true;
          break;
        }
      }
      if (done) break;
      merged_draws += static_cast<std::uint64_t>(shard.draws);
      if (merged_draws >= next_abort_check) {
        const double rate = static_cast<double>(result.samples.size()) /
                            static_cast<double>(merged_draws);
        if (rate < kMinAcceptanceRate) {
          throw Error(
              "band [" + std::to_string(band.lo_bits) + ", " +
              std::to_string(band.hi_bits) + "] bits looks unreachable: " +
              std::to_string(result.samples.size()) + " accepted in " +
              std::to_string(merged_draws) + " draws (rate below 1e-6)");
        }
        next_abort_check = merged_draws + kAbortCheckDraws;
      }
    }
  }

  result.acceptance_rate = static_cast<double>(n_accepted) /
                           static_cast<double>(result.draws);
  return result;
}

}  // namespace descspace::sampling
