#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace descspace {

/// One joint outcome: a value index per component.
using Outcome = std::vector<int>;

/// Ordered list of component indices identifying a subsystem.  Always kept
/// strictly ascending; validate_subset enforces that.
using Subset = std::vector<int>;

/// Sparse probability table over a finite product alphabet.
///
/// Entries are stored sorted by outcome (lexicographic), duplicate outcomes
/// are merged and zero-mass outcomes dropped, so two tables describing the
/// same distribution compare equal entry by entry.
class JointTable {
 public:
  /// Builds a table from (outcome, mass) pairs.  Throws descspace::Error if
  /// an outcome is out of range, a mass is negative or non-finite, or the
  /// total mass differs from 1 by more than 1e-12 (after which the table is
  /// renormalized exactly).
  JointTable(std::vector<int> alphabet_sizes, std::vector<Outcome> outcomes,
             std::vector<double> masses);

  int n_components() const { return static_cast<int>(alphabet_sizes_.size()); }
  const std::vector<int>& alphabet_sizes() const { return alphabet_sizes_; }
  std::size_t size() const { return masses_.size(); }
  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  const std::vector<double>& masses() const { return masses_; }

  /// Marginal table on the given subset (ascending component indices).  An
  /// empty subset yields the trivial table with a single empty outcome.
  JointTable marginal(const Subset& subset) const;

  /// Probability vector of a single component.
  std::vector<double> component_marginal(int component) const;

  /// Checks that a subset is strictly ascending and within range; throws
  /// descspace::Error otherwise.
  void validate_subset(const Subset& subset) const;

 private:
  JointTable() = default;
  std::vector<int> alphabet_sizes_;
  std::vector<Outcome> outcomes_;
  std::vector<double> masses_;
};

/// Packs an outcome restricted to `subset` into a mixed-radix integer key.
/// Radices are the subset's alphabet sizes; requires the product to fit in
/// 62 bits, which holds for every system this library builds.
std::uint64_t pack_outcome(const Outcome& outcome, const Subset& subset,
                           const std::vector<int>& alphabet_sizes);

/// Human-readable outcome rendering, values joined with '-'.
std::string format_outcome(const Outcome& outcome);

}  // namespace descspace
