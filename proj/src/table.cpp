#include "descspace/table.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "descspace/errors.hpp"
#include "descspace/numeric.hpp"

namespace descspace {

namespace {

constexpr double kMassTolerance = 1e-12;

void check_key_capacity(const std::vector<int>& sizes) {
  long double product = 1.0L;
  for (int m : sizes) product *= m;
  if (product > 0x1.0p62) {
    throw Error("joint outcome space too large to index");
  }
}

}  // namespace

JointTable::JointTable(std::vector<int> alphabet_sizes,
                       std::vector<Outcome> outcomes,
                       std::vector<double> masses)
    : alphabet_sizes_(std::move(alphabet_sizes)) {
  for (int m : alphabet_sizes_) {
    if (m < 1) throw Error("alphabet sizes must be positive");
  }
  check_key_capacity(alphabet_sizes_);
  if (outcomes.size() != masses.size()) {
    throw Error("outcome and mass counts differ");
  }
  if (outcomes.empty()) throw Error("table needs at least one outcome");

  const int n = n_components();
  Subset all(n);
  std::iota(all.begin(), all.end(), 0);

  std::vector<std::pair<std::uint64_t, double>> entries;
  entries.reserve(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const Outcome& o = outcomes[i];
    if (static_cast<int>(o.size()) != n) {
      throw Error("outcome arity does not match component count");
    }
    for (int c = 0; c < n; ++c) {
      if (o[c] < 0 || o[c] >= alphabet_sizes_[c]) {
        throw Error("outcome value out of range for component " +
                    std::to_string(c));
      }
    }
    const double w = masses[i];
    if (!std::isfinite(w) || w < 0.0) {
      throw Error("masses must be finite and non-negative");
    }
    entries.emplace_back(pack_outcome(o, all, alphabet_sizes_), w);
  }

  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  NeumaierAccumulator total_acc;
  std::vector<std::pair<std::uint64_t, double>> merged;
  merged.reserve(entries.size());
  for (const auto& [key, w] : entries) {
    if (!merged.empty() && merged.back().first == key) {
      merged.back().second += w;
    } else {
      merged.emplace_back(key, w);
    }
    total_acc.add(w);
  }
  const double total = total_acc.total();
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw Error("masses sum to " + std::to_string(total) + ", expected 1");
  }

  outcomes_.reserve(merged.size());
  masses_.reserve(merged.size());
  for (const auto& [key, w] : merged) {
    if (w == 0.0) continue;
    Outcome o(n);
    std::uint64_t k = key;
    for (int c = n - 1; c >= 0; --c) {
      o[c] = static_cast<int>(k % alphabet_sizes_[c]);
      k /= alphabet_sizes_[c];
    }
    outcomes_.push_back(std::move(o));
    masses_.push_back(w / total);
  }
  if (masses_.empty()) throw Error("table has no positive mass");
}

void JointTable::validate_subset(const Subset& subset) const {
  int prev = -1;
  for (int c : subset) {
    if (c < 0 || c >= n_components()) {
      throw Error("subset component " + std::to_string(c) + " out of range");
    }
    if (c <= prev) throw Error("subset indices must be strictly ascending");
    prev = c;
  }
}

JointTable JointTable::marginal(const Subset& subset) const {
  validate_subset(subset);

  std::vector<int> sub_sizes;
  sub_sizes.reserve(subset.size());
  for (int c : subset) sub_sizes.push_back(alphabet_sizes_[c]);

  JointTable out;
  out.alphabet_sizes_ = sub_sizes;
  if (subset.empty()) {
    out.outcomes_ = {Outcome{}};
    out.masses_ = {1.0};
    return out;
  }

  std::vector<std::pair<std::uint64_t, double>> grouped;
  grouped.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    grouped.emplace_back(pack_outcome(outcomes_[i], subset, alphabet_sizes_),
                         masses_[i]);
  }
  std::sort(grouped.begin(), grouped.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const int k = static_cast<int>(subset.size());
  std::uint64_t prev_key = 0;
  for (const auto& [key, w] : grouped) {
    if (!out.masses_.empty() && key == prev_key) {
      out.masses_.back() += w;
      continue;
    }
    Outcome o(k);
    std::uint64_t rest = key;
    for (int c = k - 1; c >= 0; --c) {
      o[c] = static_cast<int>(rest % sub_sizes[c]);
      rest /= sub_sizes[c];
    }
    out.outcomes_.push_back(std::move(o));
    out.masses_.push_back(w);
    prev_key = key;
  }
  return out;
}

std::vector<double> JointTable::component_marginal(int component) const {
  validate_subset({component});
  std::vector<double> p(alphabet_sizes_[component], 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    p[outcomes_[i][component]] += masses_[i];
  }
  return p;
}

std::uint64_t pack_outcome(const Outcome& outcome, const Subset& subset,
                           const std::vector<int>& alphabet_sizes) {
  std::uint64_t key = 0;
  for (int c : subset) {
    key = key * static_cast<std::uint64_t>(alphabet_sizes[c]) +
          static_cast<std::uint64_t>(outcome[c]);
  }
  return key;
}

std::string format_outcome(const Outcome& outcome) {
  std::ostringstream os;
  for (std::size_t i = 0; i < outcome.size(); ++i) {
    if (i) os << '-';
    os << outcome[i];
  }
  return os.str();
}

}  // namespace descspace
