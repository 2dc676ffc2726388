#include <doctest.h>

#include <cmath>
#include <vector>

#include "descspace/channels.hpp"
#include "descspace/errors.hpp"
#include "descspace/infotheory.hpp"
#include "descspace/objective.hpp"
#include "descspace/rng.hpp"
#include "descspace/sampling.hpp"
#include "descspace/table.hpp"

using namespace descspace;

namespace {

JointTable xor_triple() {
  return JointTable({2, 2, 2}, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}},
                    {0.25, 0.25, 0.25, 0.25});
}

JointTable copy_triple() {
  return JointTable({2, 2, 2}, {{0, 0, 0}, {1, 1, 1}}, {0.5, 0.5});
}

JointTable random_table(const std::vector<int>& sizes, std::uint64_t seed) {
  std::vector<Outcome> outcomes;
  std::vector<double> masses;
  RngStream rng(seed);
  std::size_t states = 1;
  for (int m : sizes) states *= m;
  double total = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    Outcome o(sizes.size());
    std::size_t k = s;
    for (int c = static_cast<int>(sizes.size()) - 1; c >= 0; --c) {
      o[c] = static_cast<int>(k % sizes[c]);
      k /= sizes[c];
    }
    outcomes.push_back(std::move(o));
    const double w = rng.uniform(0.1, 1.0);
    masses.push_back(w);
    total += w;
  }
  for (double& w : masses) w /= total;
  return JointTable(sizes, outcomes, masses);
}

std::vector<channels::DiscreteChannel> identity_description(
    const JointTable& table) {
  std::vector<channels::DiscreteChannel> description;
  for (int c = 0; c < table.n_components(); ++c) {
    channels::HardChannel hard;
    for (int a = 0; a < table.alphabet_sizes()[c]; ++a)
      hard.labels.push_back(a);
    description.push_back(channels::to_discrete(hard));
  }
  return description;
}

}  // namespace

TEST_SUITE("infotheory") {
  TEST_CASE("parity triple: two bits of entropy, synergy minus one") {
    const auto t = xor_triple();
    CHECK(infotheory::entropy(t) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(infotheory::entropy(t, {0, 1}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(infotheory::entropy(t, {}) == doctest::Approx(0.0));
    const auto singles = infotheory::component_entropies(t);
    for (double h : singles) CHECK(h == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(infotheory::total_correlation(t) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(infotheory::o_information(t) == doctest::Approx(-1.0).epsilon(1e-12));
  }

  TEST_CASE("copy triple: redundancy plus one") {
    const auto t = copy_triple();
    CHECK(infotheory::total_correlation(t) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(infotheory::o_information(t) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("product tables carry no correlation") {
    const auto t = random_table({2, 3}, 12);
    const auto px = t.component_marginal(0);
    const auto py = t.component_marginal(1);
    std::vector<Outcome> outcomes;
    std::vector<double> masses;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 3; ++y) {
        outcomes.push_back({x, y});
        masses.push_back(px[x] * py[y]);
      }
    const JointTable prod({2, 3}, outcomes, masses);
    CHECK(infotheory::total_correlation(prod) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("o-information needs three components") {
    const auto t = random_table({2, 2}, 3);
    CHECK_THROWS_AS(infotheory::o_information(t), Error);
  }

  TEST_CASE("identity channels recover subset entropies") {
    const auto t = xor_triple();
    const auto id = identity_description(t);
    CHECK(infotheory::channel_mutual_information(t, id, {0, 1, 2}) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(infotheory::channel_mutual_information(t, id, {0}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(infotheory::channel_mutual_information(t, id, {0, 1}) ==
          doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("constant channels carry nothing") {
    const auto t = xor_triple();
    channels::HardChannel flat;
    flat.labels = {0, 0};
    const auto q = channels::to_discrete(flat);
    CHECK(infotheory::channel_mutual_information(t, {q, q, q}, {0, 1, 2}) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("identity pushforward reproduces the table") {
    const auto t = random_table({3, 2, 2}, 77);
    const auto joint = infotheory::description_joint(t, identity_description(t));
    REQUIRE(joint.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(joint.outcomes()[i] == t.outcomes()[i]);
      CHECK(joint.masses()[i] == doctest::Approx(t.masses()[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("merging pushforward collapses outcomes") {
    const auto t = random_table({3, 2}, 5);
    channels::HardChannel merge3;
    merge3.labels = {0, 0, 1};
    channels::HardChannel id2;
    id2.labels = {0, 1};
    const auto joint = infotheory::description_joint(
        t, {channels::to_discrete(merge3), channels::to_discrete(id2)});
    CHECK(joint.alphabet_sizes() == std::vector<int>{2, 2});
    double m00 = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t.outcomes()[i][0] <= 1 && t.outcomes()[i][1] == 0)
        m00 += t.masses()[i];
    }
    CHECK(joint.masses()[0] == doctest::Approx(m00).epsilon(1e-12));
  }

  TEST_CASE("per-term description quantities match the pushforward") {
    const auto t = random_table({3, 3, 2}, 2026);
    const auto parts3 = sampling::enumerate_partitions(3);
    const auto parts2 = sampling::enumerate_partitions(2);
    RngStream rng(99);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<channels::DiscreteChannel> description;
      std::vector<channels::HardChannel> hard(3);
      hard[0].labels = parts3[rng.uniform_index(parts3.size())];
      hard[1].labels = parts3[rng.uniform_index(parts3.size())];
      hard[2].labels = parts2[rng.uniform_index(parts2.size())];
      for (const auto& h : hard) description.push_back(channels::to_discrete(h));
      const auto joint = infotheory::description_joint(t, description);
      CHECK(infotheory::description_tc(t, description) ==
            doctest::Approx(infotheory::total_correlation(joint))
                .epsilon(1e-9));
      CHECK(infotheory::description_o(t, description) ==
            doctest::Approx(infotheory::o_information(joint)).epsilon(1e-9));
    }
  }

  TEST_CASE("noisy channels shrink mutual information") {
    const auto t = xor_triple();
    channels::BscChannel half;
    half.flip_probability = 0.5;
    const auto q = channels::to_discrete(half);
    const auto joint = infotheory::description_joint(t, {q, q, q});
    CHECK(infotheory::total_correlation(joint) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(infotheory::channel_mutual_information(t, {q, q, q}, {0}) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("pointwise decompositions sum to the summary value") {
    const auto t = xor_triple();
    const auto tc_points = infotheory::pointwise_tc(t);
    REQUIRE(tc_points.size() == 4);
    double tc_sum = 0.0;
    for (const auto& p : tc_points) {
      CHECK(p.local_bits == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(p.contribution_bits ==
            doctest::Approx(p.mass * p.local_bits).epsilon(1e-12));
      tc_sum += p.contribution_bits;
    }
    CHECK(tc_sum == doctest::Approx(1.0).epsilon(1e-12));

    const auto o_points = infotheory::pointwise_o(t);
    double o_sum = 0.0;
    for (const auto& p : o_points) o_sum += p.contribution_bits;
    CHECK(o_sum == doctest::Approx(-1.0).epsilon(1e-12));
  }

  TEST_CASE("pointwise contributions of a random table are exhaustive") {
    const auto t = random_table({3, 2, 2}, 41);
    double tc_sum = 0.0;
    const auto tc_points = infotheory::pointwise_tc(t);
    for (std::size_t i = 0; i + 1 < tc_points.size(); ++i) {
      CHECK(tc_points[i].contribution_bits >=
            tc_points[i + 1].contribution_bits);
    }
    for (const auto& p : tc_points) tc_sum += p.contribution_bits;
    CHECK(tc_sum ==
          doctest::Approx(infotheory::total_correlation(t)).epsilon(1e-9));
    double o_sum = 0.0;
    for (const auto& p : infotheory::pointwise_o(t)) o_sum += p.contribution_bits;
    CHECK(o_sum == doctest::Approx(infotheory::o_information(t)).epsilon(1e-9));
  }

  TEST_CASE("subsystem sweep covers every mask in order") {
    const auto t = xor_triple();
    const auto points =
        infotheory::subsystem_points(t, infotheory::Quantity::TotalCorrelation);
    REQUIRE(points.size() == 8);
    CHECK(points[0].subset.empty());
    CHECK(points[0].quantity_bits == doctest::Approx(0.0));
    CHECK(points[3].subset == Subset{0, 1});
    CHECK(points[3].component_info_bits == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(points[3].system_info_bits == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(points[3].quantity_bits == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(points[7].subset == Subset{0, 1, 2});
    CHECK(points[7].quantity_bits == doctest::Approx(1.0).epsilon(1e-12));

    const auto omega =
        infotheory::subsystem_points(t, infotheory::Quantity::OInformation);
    CHECK(omega[3].quantity_bits == doctest::Approx(0.0));
    CHECK(omega[7].quantity_bits == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_SUITE("objective") {
  TEST_CASE("total-correlation objective lists singletons then the full set") {
    const auto spec = objective::tc_objective(3, objective::Direction::Maximize, 2.0);
    REQUIRE(spec.terms.size() == 4);
    CHECK(spec.terms[0] == Subset{0});
    CHECK(spec.terms[3] == Subset{0, 1, 2});
    CHECK(spec.weights == std::vector<double>{1.0, 1.0, 1.0, -1.0});
    const auto checked = objective::validate(spec, 3);
    CHECK(checked.ascent_weights == checked.quantity_weights);
    CHECK(checked.multi_terms == std::vector<std::size_t>{3});
    CHECK(checked.iin_bits == doctest::Approx(2.0));
  }

  TEST_CASE("minimization flips ascent weights only") {
    const auto spec = objective::tc_objective(2, objective::Direction::Minimize, 1.0);
    const auto checked = objective::validate(spec, 2);
    CHECK(checked.quantity_weights == std::vector<double>{1.0, 1.0, -1.0});
    CHECK(checked.ascent_weights == std::vector<double>{-1.0, -1.0, 1.0});
  }

  TEST_CASE("o-information objective weights leave-one-outs negatively") {
    const auto spec = objective::o_objective(4, objective::Direction::Minimize, 8.0);
    REQUIRE(spec.terms.size() == 9);
    CHECK(spec.terms[4] == Subset{1, 2, 3});
    CHECK(spec.weights[4] == doctest::Approx(-1.0));
    CHECK(spec.terms[8] == Subset{0, 1, 2, 3});
    CHECK(spec.weights[8] == doctest::Approx(2.0));
    CHECK_THROWS_AS(objective::o_objective(2, objective::Direction::Minimize, 1.0),
                    Error);
  }

  TEST_CASE("validation rejects malformed objectives") {
    auto spec = objective::tc_objective(3, objective::Direction::Maximize, 1.0);
    CHECK_NOTHROW(objective::validate(spec, 3));
    CHECK_THROWS_AS(objective::validate(spec, 4), Error);

    auto missing = spec;
    missing.terms.erase(missing.terms.begin());
    missing.weights.erase(missing.weights.begin());
    CHECK_THROWS_AS(objective::validate(missing, 3), Error);

    auto mismatch = spec;
    mismatch.weights.pop_back();
    CHECK_THROWS_AS(objective::validate(mismatch, 3), Error);

    auto stray = spec;
    stray.terms.push_back({1});
    stray.weights.push_back(1.0);
    CHECK_THROWS_AS(objective::validate(stray, 3), Error);

    auto unsorted = spec;
    unsorted.terms.push_back({2, 1});
    unsorted.weights.push_back(1.0);
    CHECK_THROWS_AS(objective::validate(unsorted, 3), Error);

    auto negative_budget = spec;
    negative_budget.iin_bits = -1.0;
    CHECK_THROWS_AS(objective::validate(negative_budget, 3), Error);
  }

  TEST_CASE("duplicate multi-component terms merge by weight") {
    objective::ObjectiveSpec spec;
    spec.terms = {{0}, {1}, {2}, {0, 1}, {0, 2}, {0, 1}};
    spec.weights = {1.0, 1.0, 1.0, 2.0, -1.0, 3.0};
    spec.direction = objective::Direction::Maximize;
    const auto checked = objective::validate(spec, 3);
    REQUIRE(checked.terms.size() == 5);
    CHECK(checked.terms[3] == Subset{0, 1});
    CHECK(checked.quantity_weights[3] == doctest::Approx(5.0));
    CHECK(checked.multi_terms == std::vector<std::size_t>{3, 4});
  }

  TEST_CASE("json round trip preserves the objective") {
    const auto spec = objective::o_objective(3, objective::Direction::Maximize, 2.5);
    const auto j = objective::objective_to_json(spec);
    const auto back = objective::objective_from_json(j);
    CHECK(back.terms == spec.terms);
    CHECK(back.weights == spec.weights);
    CHECK(back.direction == spec.direction);
    CHECK(back.iin_bits == doctest::Approx(spec.iin_bits));
    CHECK_THROWS_AS(objective::objective_from_json(objective::Json::array()),
                    Error);
    CHECK_THROWS_AS(objective::direction_from_string("sideways"), Error);
  }
}
