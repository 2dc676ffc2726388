#pragma once

#include <cstdint>
#include <vector>

#include "descspace/table.hpp"

namespace descspace::sampling {

/// Target window for Σ_i I(X_i;U_i) in bits.
struct InformationBand {
  double lo_bits = 0.0;
  double hi_bits = 0.0;
};

/// Set partition of {0..m-1} in restricted-growth form: element a belongs to
/// cluster partition[a], clusters numbered by first appearance.
using Partition = std::vector<int>;

/// Bell number, the count of set partitions of m elements.  Supports m <= 8.
std::uint64_t bell_number(int m);

/// All set partitions of m elements in lexicographic restricted-growth
/// order.  Complete and duplicate-free; size equals bell_number(m).
std::vector<Partition> enumerate_partitions(int m);

/// One randomly drawn description made of binary symmetric channels, with
/// exact information quantities from the pushforward table.
struct BscSurveyPoint {
  std::vector<double> flip;  // per-component flip probability
  double sum_info_bits = 0.0;
  double tc_bits = 0.0;
  double o_bits = 0.0;
};

/// Draws n_draws descriptions over a system of binary components; each
/// component gets an independent flip probability uniform in [0, 0.5].
/// Sharded deterministically, so results do not depend on thread count.
std::vector<BscSurveyPoint> random_bsc_survey(const JointTable& table,
                                              long n_draws,
                                              std::uint64_t seed);

/// One accepted hard description: a partition index per component (into
/// enumerate_partitions of that component's alphabet) plus exact quantities.
struct HardSample {
  std::vector<int> partition_index;
  double sum_info_bits = 0.0;
  double tc_bits = 0.0;
  double o_bits = 0.0;
};

struct HardSampleResult {
  std::vector<HardSample> samples;
  std::uint64_t draws = 0;  // position of the last accepted draw
  double acceptance_rate = 0.0;
};

/// Rejection-samples hard descriptions: each draw picks one partition per
/// component uniformly from that component's partition list and is accepted
/// iff the exact Σ_i I(X_i;U_i) = Σ_i H(U_i) lies inside the band
/// (inclusive).  Runs until n_accepted draws are kept.  Aborts with a
/// diagnostic once the observed acceptance rate sits below 1e-6, which
/// signals an unreachable band.  Draws are sharded deterministically, so
/// results do not depend on thread count.
HardSampleResult rejection_sample_hard(const JointTable& table,
                                       const InformationBand& band,
                                       long n_accepted, std::uint64_t seed);

}  // namespace descspace::sampling
