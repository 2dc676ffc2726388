#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "descspace/errors.hpp"
#include "descspace/infotheory.hpp"
#include "descspace/numeric.hpp"
#include "descspace/parallel.hpp"
#include "descspace/rng.hpp"
#include "descspace/systems.hpp"
#include "descspace/table.hpp"

using namespace descspace;

namespace {

std::filesystem::path temp_file(const std::string& name,
                                const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_SUITE("rng") {
  TEST_CASE("same seed reproduces the stream") {
    RngStream a(42), b(42);
    for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
  }

  TEST_CASE("derived seeds differ by purpose and by index") {
    const std::uint64_t master = 7;
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 8; ++i) {
      seen.insert(derive_seed(master, "eval", i));
      seen.insert(derive_seed(master, "repeat", i));
    }
    seen.insert(derive_seed(master, "eval-shard", 0));
    CHECK(seen.size() == 17);
    CHECK(derive_seed(master, "eval", 3) == derive_seed(master, "eval", 3));
  }

  TEST_CASE("uniform01 stays in the half-open unit interval") {
    RngStream rng(9001);
    for (int i = 0; i < 4096; ++i) {
      const double u = rng.uniform01();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
    }
  }

  TEST_CASE("uniform_index covers the range without bias") {
    RngStream rng(5);
    std::vector<int> counts(3, 0);
    for (int i = 0; i < 3000; ++i) ++counts[rng.uniform_index(3)];
    for (int c : counts) {
      CHECK(c > 850);
      CHECK(c < 1150);
    }
  }

  TEST_CASE("normal draws have the right first two moments") {
    RngStream rng(11);
    double sum = 0.0, sq = 0.0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
      const double z = rng.normal();
      sum += z;
      sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.02);
    CHECK(std::abs(sq / n - 1.0) < 0.03);
  }

  TEST_CASE("categorical draws follow the cumulative masses") {
    RngStream rng(17);
    const std::vector<double> cum = {0.2, 0.5, 1.0};
    std::vector<int> counts(3, 0);
    const int n = 20000;
    for (int i = 0; i < n; ++i) ++counts[rng.categorical_from_cumulative(cum)];
    CHECK(std::abs(counts[0] / double(n) - 0.2) < 0.02);
    CHECK(std::abs(counts[1] / double(n) - 0.3) < 0.02);
    CHECK(std::abs(counts[2] / double(n) - 0.5) < 0.02);
  }
}

TEST_SUITE("numeric") {
  TEST_CASE("neumaier sum survives catastrophic cancellation") {
    NeumaierAccumulator acc;
    acc.add(1.0);
    acc.add(1e100);
    acc.add(1.0);
    acc.add(-1e100);
    CHECK(acc.total() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(neumaier_sum({1.0, 1e100, 1.0, -1e100}) ==
          doctest::Approx(2.0).epsilon(1e-15));
  }

  TEST_CASE("logsumexp matches direct evaluation and resists overflow") {
    const std::vector<double> v = {std::log(1.0), std::log(2.0), std::log(3.0)};
    CHECK(logsumexp(v) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
    CHECK(logsumexp({5.0}) == doctest::Approx(5.0));
    CHECK(logsumexp({1000.0, 1000.0}) ==
          doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-14));
  }

  TEST_CASE("binary entropy endpoints and a fixed interior value") {
    CHECK(binary_entropy_bits(0.0) == 0.0);
    CHECK(binary_entropy_bits(1.0) == 0.0);
    CHECK(binary_entropy_bits(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(binary_entropy_bits(0.11) ==
          doctest::Approx(0.49991595816477305).epsilon(1e-12));
  }
}

TEST_SUITE("parallel") {
  TEST_CASE("shard results are independent of the worker count") {
    auto run = [](const char* threads) {
      setenv("DESCSPACE_THREADS", threads, 1);
      std::vector<double> slots(64, 0.0);
      parallel_shards(64, [&](std::size_t s) {
        RngStream rng(derive_seed(3, "shard", s));
        double acc = 0.0;
        for (int i = 0; i < 100; ++i) acc += rng.uniform01();
        slots[s] = acc;
      });
      unsetenv("DESCSPACE_THREADS");
      return slots;
    };
    CHECK(run("1") == run("4"));
  }

  TEST_CASE("exceptions from workers propagate") {
    CHECK_THROWS_AS(parallel_shards(8,
                                    [](std::size_t s) {
                                      if (s == 5) throw Error("boom");
                                    }),
                    Error);
  }
}

TEST_SUITE("table") {
  TEST_CASE("duplicates merge and zero-mass outcomes drop") {
    JointTable t({2, 2}, {{0, 0}, {0, 0}, {1, 1}, {0, 1}},
                 {0.125, 0.125, 0.75, 0.0});
    CHECK(t.size() == 2);
    CHECK(t.outcomes()[0] == Outcome{0, 0});
    CHECK(t.masses()[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(t.masses()[1] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK_THROWS_AS(JointTable({2, 2}, {{0, 0}, {1, 1}}, {1.0, 6.0}), Error);
  }

  TEST_CASE("outcomes come out sorted lexicographically") {
    JointTable t({2, 2}, {{1, 0}, {0, 1}, {0, 0}}, {0.25, 0.25, 0.5});
    CHECK(t.outcomes() == std::vector<Outcome>{{0, 0}, {0, 1}, {1, 0}});
  }

  TEST_CASE("construction rejects malformed input") {
    CHECK_THROWS_AS(JointTable({2}, {{0, 1}}, {1.0}), Error);
    CHECK_THROWS_AS(JointTable({2}, {{2}}, {1.0}), Error);
    CHECK_THROWS_AS(JointTable({2}, {{-1}}, {1.0}), Error);
    CHECK_THROWS_AS(JointTable({2}, {{0}, {1}}, {0.5, -0.5}), Error);
    CHECK_THROWS_AS(JointTable({2}, {}, {}), Error);
    CHECK_THROWS_AS(JointTable({2}, {{0}}, {0.0}), Error);
  }

  TEST_CASE("marginals of a product table factorize") {
    std::vector<Outcome> outcomes;
    std::vector<double> masses;
    const std::vector<double> px = {0.25, 0.75};
    const std::vector<double> py = {0.1, 0.2, 0.7};
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 3; ++y) {
        outcomes.push_back({x, y});
        masses.push_back(px[x] * py[y]);
      }
    JointTable t({2, 3}, outcomes, masses);
    const auto mx = t.marginal({0});
    REQUIRE(mx.size() == 2);
    CHECK(mx.masses()[0] == doctest::Approx(0.25).epsilon(1e-14));
    const auto my = t.component_marginal(1);
    CHECK(my[2] == doctest::Approx(0.7).epsilon(1e-14));
    const auto empty = t.marginal({});
    CHECK(empty.size() == 1);
    CHECK(empty.masses()[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(empty.outcomes()[0].empty());
  }

  TEST_CASE("subset validation enforces ascending in-range indices") {
    JointTable t({2, 2, 2}, {{0, 0, 0}, {1, 1, 1}}, {0.5, 0.5});
    CHECK_NOTHROW(t.validate_subset({0, 2}));
    CHECK_THROWS_AS(t.validate_subset({2, 0}), Error);
    CHECK_THROWS_AS(t.validate_subset({1, 1}), Error);
    CHECK_THROWS_AS(t.validate_subset({3}), Error);
    CHECK_THROWS_AS(t.validate_subset({-1}), Error);
  }

  TEST_CASE("pack_outcome uses mixed radix over the subset") {
    const std::vector<int> sizes = {2, 3, 4};
    CHECK(pack_outcome({1, 2, 3}, {0, 1, 2}, sizes) ==
          pack_outcome({1, 2, 3}, {0, 1, 2}, sizes));
    std::set<std::uint64_t> keys;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 3; ++y)
        for (int z = 0; z < 4; ++z) keys.insert(pack_outcome({x, y, z}, {0, 1, 2}, sizes));
    CHECK(keys.size() == 24);
    CHECK(pack_outcome({1, 2, 3}, {1}, sizes) == pack_outcome({0, 2, 0}, {1}, sizes));
  }

  TEST_CASE("format_outcome joins values with dashes") {
    CHECK(format_outcome({1, 0, 2}) == "1-0-2");
    CHECK(format_outcome({}) == "");
  }
}

TEST_SUITE("systems") {
  TEST_CASE("two-spin ferromagnet matches the closed form") {
    systems::IsingSpec spec;
    spec.coupling = Eigen::MatrixXd::Zero(2, 2);
    spec.coupling(0, 1) = spec.coupling(1, 0) = 1.0;
    spec.kT = 1.0;
    const auto t = systems::build_ising(spec);
    REQUIRE(t.size() == 4);
    CHECK(infotheory::entropy(t) ==
          doctest::Approx(1.5270653410025675).epsilon(1e-12));
    CHECK(infotheory::total_correlation(t) ==
          doctest::Approx(0.4729346589974325).epsilon(1e-12));
  }

  TEST_CASE("zero coupling gives independent fair spins") {
    systems::IsingSpec spec;
    spec.coupling = Eigen::MatrixXd::Zero(3, 3);
    spec.kT = 0.625;
    const auto t = systems::build_ising(spec);
    CHECK(t.size() == 8);
    for (double m : t.masses()) CHECK(m == doctest::Approx(0.125).epsilon(1e-14));
  }

  TEST_CASE("ising construction rejects malformed specs") {
    systems::IsingSpec spec;
    spec.coupling = Eigen::MatrixXd::Zero(2, 2);
    spec.coupling(0, 1) = 1.0;  // asymmetric
    CHECK_THROWS_AS(systems::build_ising(spec), Error);
    spec.coupling(1, 0) = 1.0;
    spec.kT = 0.0;
    CHECK_THROWS_AS(systems::build_ising(spec), Error);
    spec.kT = 1.0;
    spec.coupling(0, 0) = 2.0;
    CHECK_THROWS_AS(systems::build_ising(spec), Error);
  }

  TEST_CASE("board validation accepts latin-constrained grids only") {
    CHECK(systems::validate_board("1234341221434321"));
    CHECK_FALSE(systems::validate_board("1111111111111111"));
    CHECK_FALSE(systems::validate_board("1234341221434312"));
    CHECK_FALSE(systems::validate_board("123434122143432"));
    CHECK_FALSE(systems::validate_board("1234341221434325"));
  }

  TEST_CASE("board generation finds all 288 states, sorted and valid") {
    const auto boards = systems::generate_boards();
    REQUIRE(boards.size() == 288);
    CHECK(std::is_sorted(boards.begin(), boards.end()));
    CHECK(std::set<std::string>(boards.begin(), boards.end()).size() == 288);
    for (const auto& b : boards) CHECK(systems::validate_board(b));
  }

  TEST_CASE("sudoku tables reject bad boards and collapse duplicates") {
    const auto boards = systems::generate_boards();
    std::vector<std::string> catalog = {boards[0], boards[1], boards[0],
                                        "1111111111111111", "bogus"};
    std::vector<std::string> rejected;
    const auto t = systems::build_sudoku(catalog, &rejected);
    CHECK(t.size() == 2);
    CHECK(t.masses()[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(rejected == std::vector<std::string>{"1111111111111111", "bogus"});
    CHECK_THROWS_AS(systems::build_sudoku(catalog), Error);
  }

  TEST_CASE("catalog files skip comments and blanks") {
    const auto boards = systems::generate_boards();
    const auto path = temp_file("descspace_catalog_test.txt",
                                "# header\n\n" + boards[0] + "\n" + boards[5] +
                                    "\n\n# trailing\n");
    const auto t = systems::load_sudoku_catalog(path.string());
    CHECK(t.size() == 2);
    CHECK(t.n_components() == 16);
    std::filesystem::remove(path);
  }

  TEST_CASE("frequency lists filter by length then by charset") {
    const auto path = temp_file("descspace_words4_test.txt",
                                "them 100\nthen 50\nthe 30\nthey 20\nca'n 10\nabcd 5\n");
    systems::NgramSpec spec;
    spec.word_length = 4;
    spec.window = systems::NgramWindow::Whole;
    spec.max_rank = 4;
    const auto t = systems::load_ngrams(path.string(), spec);
    // Rank slots go to them/then/they/ca'n; the apostrophe row is then dropped.
    REQUIRE(t.size() == 3);
    CHECK(t.n_components() == 4);
    CHECK(t.alphabet_sizes()[0] == 26);
    const double total = 100.0 + 50.0 + 20.0;
    const Outcome them = {19, 7, 4, 12};
    bool found = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t.outcomes()[i] == them) {
        found = true;
        CHECK(t.masses()[i] == doctest::Approx(100.0 / total).epsilon(1e-14));
      }
    }
    CHECK(found);
    std::filesystem::remove(path);
  }

  TEST_CASE("letter windows slice eight-letter words and merge duplicates") {
    const auto path = temp_file("descspace_words8_test.txt",
                                "abcdwxyz 30\nabcdmnop 20\nqrstuvwx 50\n");
    systems::NgramSpec spec;
    spec.word_length = 8;
    spec.window = systems::NgramWindow::First;
    spec.max_rank = 100;
    const auto first = systems::load_ngrams(path.string(), spec);
    REQUIRE(first.size() == 2);
    CHECK(first.n_components() == 4);
    const Outcome abcd = {0, 1, 2, 3};
    for (std::size_t i = 0; i < first.size(); ++i)
      if (first.outcomes()[i] == abcd)
        CHECK(first.masses()[i] == doctest::Approx(0.5).epsilon(1e-14));
    spec.window = systems::NgramWindow::Second;
    const auto second = systems::load_ngrams(path.string(), spec);
    CHECK(second.size() == 3);
    spec.window = systems::NgramWindow::Whole;
    const auto whole = systems::load_ngrams(path.string(), spec);
    CHECK(whole.n_components() == 8);
    spec.word_length = 4;
    spec.window = systems::NgramWindow::First;
    CHECK_THROWS_AS(systems::load_ngrams(path.string(), spec), Error);
    std::filesystem::remove(path);
  }
}
