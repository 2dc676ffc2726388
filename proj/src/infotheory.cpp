#include "descspace/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "descspace/errors.hpp"
#include "descspace/numeric.hpp"

namespace descspace::infotheory {

namespace {

double entropy_of_masses(const std::vector<double>& masses) {
  NeumaierAccumulator acc;
  for (double p : masses) {
    if (p > 0.0) acc.add(-p * std::log2(p));
  }
  return acc.total();
}

Subset complement_of(int n, int skip) {
  Subset s;
  s.reserve(n - 1);
  for (int c = 0; c < n; ++c) {
    if (c != skip) s.push_back(c);
  }
  return s;
}

/// O-information by the defining formula, valid for any component count
/// (0 for fewer than three components by construction).
double o_information_any(const JointTable& table) {
  const int n = table.n_components();
  NeumaierAccumulator acc;
  acc.add((n - 2) * entropy(table));
  for (int i = 0; i < n; ++i) {
    acc.add(entropy(table, {i}));
    acc.add(-entropy(table, complement_of(n, i)));
  }
  return acc.total();
}

void check_description(const JointTable& table,
                       const std::vector<channels::DiscreteChannel>& channels) {
  if (channels.size() != static_cast<std::size_t>(table.n_components())) {
    throw Error("description size does not match component count");
  }
  for (int i = 0; i < table.n_components(); ++i) {
    if (channels[i].in_arity() != table.alphabet_sizes()[i]) {
      throw Error("channel input arity does not match component " +
                  std::to_string(i));
    }
    if (channels[i].out_arity() < 1) {
      throw Error("channel output arity must be positive");
    }
    for (int a = 0; a < channels[i].in_arity(); ++a) {
      double row = 0.0;
      for (int u = 0; u < channels[i].out_arity(); ++u) {
        const double q = channels[i].q(a, u);
        if (!(q >= 0.0)) throw Error("channel entries must be non-negative");
        row += q;
      }
      if (std::abs(row - 1.0) > 1e-9) {
        throw Error("channel rows must sum to one");
      }
    }
  }
}

/// Sparse mixture masses of U_S given the subset marginal and the subset's
/// channels, keyed by packed output outcome.  Keys come out sorted.
std::vector<std::pair<std::uint64_t, double>> sparse_pushforward(
    const JointTable& marg,
    const std::vector<const channels::DiscreteChannel*>& subset_channels) {
  const int k = static_cast<int>(subset_channels.size());
  long double key_space = 1.0L;
  for (const auto* ch : subset_channels) key_space *= ch->out_arity();
  if (key_space > 0x1.0p62) {
    throw Error("description output space too large to index");
  }

  // Per-row support lists so deterministic channels expand to single terms.
  std::vector<std::vector<std::vector<int>>> support(k);
  for (int t = 0; t < k; ++t) {
    const auto& q = subset_channels[t]->q;
    support[t].resize(q.rows());
    for (int a = 0; a < q.rows(); ++a) {
      for (int u = 0; u < q.cols(); ++u) {
        if (q(a, u) > 0.0) support[t][a].push_back(u);
      }
    }
  }

  std::vector<std::pair<std::uint64_t, double>> terms;
  std::vector<int> pick(k, 0);
  for (std::size_t s = 0; s < marg.size(); ++s) {
    const Outcome& x = marg.outcomes()[s];
    const double px = marg.masses()[s];
    // Enumerate the product support of this row combination.
    std::fill(pick.begin(), pick.end(), 0);
    for (;;) {
      std::uint64_t key = 0;
      double mass = px;
      for (int t = 0; t < k; ++t) {
        const int u = support[t][x[t]][pick[t]];
        key = key * static_cast<std::uint64_t>(subset_channels[t]->out_arity()) +
              static_cast<std::uint64_t>(u);
        mass *= subset_channels[t]->q(x[t], u);
      }
      terms.emplace_back(key, mass);
      if (terms.size() > std::size_t{1} << 24) {
        throw Error("description support too large to enumerate");
      }
      int t = k - 1;
      while (t >= 0 &&
             pick[t] + 1 == static_cast<int>(support[t][x[t]].size())) {
        pick[t] = 0;
        --t;
      }
      if (t < 0) break;
      ++pick[t];
    }
  }

  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<std::uint64_t, double>> merged;
  merged.reserve(terms.size());
  for (const auto& [key, mass] : terms) {
    if (!merged.empty() && merged.back().first == key) {
      merged.back().second += mass;
    } else {
      merged.emplace_back(key, mass);
    }
  }
  return merged;
}

}  // namespace

double entropy(const JointTable& table, const Subset& subset) {
  return entropy_of_masses(table.marginal(subset).masses());
}

double entropy(const JointTable& table) {
  return entropy_of_masses(table.masses());
}

std::vector<double> component_entropies(const JointTable& table) {
  std::vector<double> h(table.n_components());
  for (int i = 0; i < table.n_components(); ++i) h[i] = entropy(table, {i});
  return h;
}

double total_correlation(const JointTable& table) {
  NeumaierAccumulator acc;
  for (double h : component_entropies(table)) acc.add(h);
  acc.add(-entropy(table));
  return acc.total();
}

double o_information(const JointTable& table) {
  if (table.n_components() < 3) {
    throw Error("o-information needs at least three components");
  }
  return o_information_any(table);
}

double channel_mutual_information(
    const JointTable& table,
    const std::vector<channels::DiscreteChannel>& description,
    const Subset& subset) {
  check_description(table, description);
  table.validate_subset(subset);
  if (subset.empty()) return 0.0;

  const JointTable marg = table.marginal(subset);
  std::vector<const channels::DiscreteChannel*> subset_channels;
  subset_channels.reserve(subset.size());
  for (int c : subset) subset_channels.push_back(&description[c]);

  const auto mixture = sparse_pushforward(marg, subset_channels);
  NeumaierAccumulator h_out;
  for (const auto& [key, mass] : mixture) {
    if (mass > 0.0) h_out.add(-mass * std::log2(mass));
  }

  // H(U_S | X_S) = Σ_t H(U_t | X_t) by conditional independence.
  NeumaierAccumulator h_cond;
  for (std::size_t t = 0; t < subset.size(); ++t) {
    const auto& q = subset_channels[t]->q;
    const std::vector<double> px = table.component_marginal(subset[t]);
    for (int a = 0; a < q.rows(); ++a) {
      if (px[a] <= 0.0) continue;
      double row = 0.0;
      for (int u = 0; u < q.cols(); ++u) {
        const double v = q(a, u);
        if (v > 0.0) row += -v * std::log2(v);
      }
      h_cond.add(px[a] * row);
    }
  }
  return h_out.total() - h_cond.total();
}

JointTable description_joint(
    const JointTable& table,
    const std::vector<channels::DiscreteChannel>& description) {
  check_description(table, description);
  const int n = table.n_components();
  Subset all(n);
  std::iota(all.begin(), all.end(), 0);

  std::vector<const channels::DiscreteChannel*> ptrs;
  ptrs.reserve(n);
  std::vector<int> out_sizes;
  out_sizes.reserve(n);
  for (const auto& ch : description) {
    ptrs.push_back(&ch);
    out_sizes.push_back(ch.out_arity());
  }

  const auto mixture = sparse_pushforward(table, ptrs);
  std::vector<Outcome> outcomes;
  std::vector<double> masses;
  outcomes.reserve(mixture.size());
  masses.reserve(mixture.size());
  for (const auto& [key, mass] : mixture) {
    Outcome o(n);
    std::uint64_t rest = key;
    for (int c = n - 1; c >= 0; --c) {
      o[c] = static_cast<int>(rest % out_sizes[c]);
      rest /= out_sizes[c];
    }
    outcomes.push_back(std::move(o));
    masses.push_back(mass);
  }
  return JointTable(out_sizes, std::move(outcomes), std::move(masses));
}

double description_tc(
    const JointTable& table,
    const std::vector<channels::DiscreteChannel>& description) {
  const int n = table.n_components();
  Subset all(n);
  std::iota(all.begin(), all.end(), 0);
  NeumaierAccumulator acc;
  for (int i = 0; i < n; ++i) {
    acc.add(channel_mutual_information(table, description, {i}));
  }
  acc.add(-channel_mutual_information(table, description, all));
  return acc.total();
}

double description_o(
    const JointTable& table,
    const std::vector<channels::DiscreteChannel>& description) {
  const int n = table.n_components();
  if (n < 3) throw Error("o-information needs at least three components");
  Subset all(n);
  std::iota(all.begin(), all.end(), 0);
  NeumaierAccumulator acc;
  acc.add((n - 2) * channel_mutual_information(table, description, all));
  for (int i = 0; i < n; ++i) {
    acc.add(channel_mutual_information(table, description, {i}));
    acc.add(-channel_mutual_information(table, description, complement_of(n, i)));
  }
  return acc.total();
}

namespace {

/// Log2 masses of a marginal keyed by packed outcome, for pointwise lookups.
struct MarginalIndex {
  Subset subset;
  std::vector<std::uint64_t> keys;
  std::vector<double> log2_mass;

  void build(const JointTable& table, Subset s) {
    subset = std::move(s);
    const JointTable marg = table.marginal(subset);
    Subset local(subset.size());
    std::iota(local.begin(), local.end(), 0);
    keys.reserve(marg.size());
    log2_mass.reserve(marg.size());
    for (std::size_t i = 0; i < marg.size(); ++i) {
      keys.push_back(
          pack_outcome(marg.outcomes()[i], local, marg.alphabet_sizes()));
      log2_mass.push_back(std::log2(marg.masses()[i]));
    }
  }

  double lookup(const Outcome& outcome,
                const std::vector<int>& alphabet_sizes) const {
    const std::uint64_t key = pack_outcome(outcome, subset, alphabet_sizes);
    const auto it = std::lower_bound(keys.begin(), keys.end(), key);
    return log2_mass[static_cast<std::size_t>(it - keys.begin())];
  }
};

std::vector<PointwiseReport> finalize_reports(
    std::vector<PointwiseReport> reports) {
  std::sort(reports.begin(), reports.end(),
            [](const PointwiseReport& a, const PointwiseReport& b) {
              if (a.contribution_bits != b.contribution_bits) {
                return a.contribution_bits > b.contribution_bits;
              }
              return a.code < b.code;
            });
  return reports;
}

}  // namespace

std::vector<PointwiseReport> pointwise_tc(const JointTable& table) {
  const int n = table.n_components();
  std::vector<MarginalIndex> singles(n);
  for (int i = 0; i < n; ++i) singles[i].build(table, {i});

  std::vector<PointwiseReport> reports;
  reports.reserve(table.size());
  for (std::size_t s = 0; s < table.size(); ++s) {
    const Outcome& x = table.outcomes()[s];
    const double p = table.masses()[s];
    double local = std::log2(p);
    for (int i = 0; i < n; ++i) {
      local -= singles[i].lookup(x, table.alphabet_sizes());
    }
    reports.push_back({x, p, local, p * local});
  }
  return finalize_reports(std::move(reports));
}

std::vector<PointwiseReport> pointwise_o(const JointTable& table) {
  const int n = table.n_components();
  if (n < 3) throw Error("o-information needs at least three components");
  std::vector<MarginalIndex> singles(n);
  std::vector<MarginalIndex> leave_outs(n);
  for (int i = 0; i < n; ++i) {
    singles[i].build(table, {i});
    leave_outs[i].build(table, complement_of(n, i));
  }

  std::vector<PointwiseReport> reports;
  reports.reserve(table.size());
  for (std::size_t s = 0; s < table.size(); ++s) {
    const Outcome& x = table.outcomes()[s];
    const double p = table.masses()[s];
    double local = -(n - 2) * std::log2(p);
    for (int i = 0; i < n; ++i) {
      local -= singles[i].lookup(x, table.alphabet_sizes());
      local += leave_outs[i].lookup(x, table.alphabet_sizes());
    }
    reports.push_back({x, p, local, p * local});
  }
  return finalize_reports(std::move(reports));
}

std::vector<SubsystemPoint> subsystem_points(const JointTable& table,
                                             Quantity quantity) {
  const int n = table.n_components();
  if (n > 16) throw Error("subsystem enumeration is limited to 16 components");

  const std::vector<double> single = component_entropies(table);
  std::vector<SubsystemPoint> points;
  points.reserve(std::size_t{1} << n);
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    SubsystemPoint point;
    for (int c = 0; c < n; ++c) {
      if (mask >> c & 1) {
        point.subset.push_back(c);
        point.component_info_bits += single[c];
      }
    }
    const JointTable marg = table.marginal(point.subset);
    point.system_info_bits = entropy(marg);
    point.quantity_bits = quantity == Quantity::TotalCorrelation
                              ? total_correlation(marg)
                              : o_information_any(marg);
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace descspace::infotheory
