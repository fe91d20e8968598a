#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "oracles.hpp"
#include "rss/designs.hpp"
#include "rss/errors.hpp"

using namespace rss;

TEST_CASE("feasibility constraints per design") {
  CHECK(is_feasible(DesignSpec::balanced(Design::Level2, 3, 7), 224));
  CHECK_FALSE(is_feasible(DesignSpec::balanced(Design::Level2, 3, 2), 17));
  CHECK(is_feasible(DesignSpec::balanced(Design::Level1, 2, 4), 10));  // 7+2 <= 10
  CHECK_FALSE(is_feasible(DesignSpec::balanced(Design::Level1, 2, 5), 10));
  CHECK(is_feasible(DesignSpec::srs(10), 10));
  CHECK_FALSE(is_feasible(DesignSpec::srs(11), 10));
  CHECK(is_feasible(DesignSpec::balanced(Design::Level0, 10, 50), 10));
  CHECK_FALSE(is_feasible(DesignSpec::balanced(Design::Level0, 11, 1), 10));
}

TEST_CASE("rank pattern validation") {
  DesignSpec bad;
  bad.design = Design::Level0;
  bad.set_size = 3;
  bad.cycles = 1;
  bad.rank_pattern = {1, 2, 4};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.rank_pattern = {1, 2};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("srs draw of the whole population is a permutation") {
  const Population pop = Population::grid(8, DistributionKind::StandardUniform);
  RandomStream rng(5);
  const RankedSetSample sample = draw_srs_wor(pop, 8, rng);
  std::set<int> ids;
  for (const auto& e : sample.entries) ids.insert(e.unit);
  CHECK(static_cast<int>(ids.size()) == 8);
  CHECK_THROWS_AS((void)draw_srs_wor(pop, 9, rng), infeasible_design_error);
}

TEST_CASE("srs single draws are uniform") {
  const int N = 6, reps = 10000;
  const Population pop = Population::grid(N, DistributionKind::StandardUniform);
  std::vector<int> counts(N, 0);
  for (int rep = 0; rep < reps; ++rep) {
    RandomStream rng = RandomStream::substream(333, static_cast<std::uint64_t>(rep));
    ++counts[static_cast<std::size_t>(draw_srs_wor(pop, 1, rng).entries[0].unit)];
  }
  const double p = 1.0 / N;
  const double se = std::sqrt(p * (1 - p) / reps);
  for (int u = 0; u < N; ++u)
    CHECK(std::fabs(counts[static_cast<std::size_t>(u)] / double(reps) - p) < 3 * se);
}

TEST_CASE("srs pairs are uniform over unordered pairs") {
  const int reps = 10000;
  const Population pop = Population::grid(3, DistributionKind::StandardUniform);
  std::map<std::pair<int, int>, int> counts;
  for (int rep = 0; rep < reps; ++rep) {
    RandomStream rng = RandomStream::substream(9, static_cast<std::uint64_t>(rep));
    const auto sample = draw_srs_wor(pop, 2, rng);
    int a = sample.entries[0].unit, b = sample.entries[1].unit;
    if (a > b) std::swap(a, b);
    ++counts[{a, b}];
  }
  CHECK(counts.size() == 3);
  const double se = std::sqrt((1.0 / 3) * (2.0 / 3) / reps);
  for (const auto& [pair, c] : counts)
    CHECK(std::fabs(c / double(reps) - 1.0 / 3) < 3 * se);
}

TEST_CASE("level-0 with sets equal to the population forces order statistics") {
  const int k = 4;
  const Population pop = Population::grid(k, DistributionKind::StandardNormal);
  const DesignSpec spec = DesignSpec::balanced(Design::Level0, k, 2);
  for (std::uint64_t seed : {0ull, 3ull, 42ull}) {
    RandomStream rng(seed);
    const RankedSetSample sample = draw_rss(pop, spec, Ranking::Perfect, rng);
    for (const auto& e : sample.measured_entries()) {
      const int r = spec.rank_pattern[static_cast<std::size_t>(e.set_index - 1)];
      CHECK(e.value == pop.x(r - 1));
    }
  }
}

TEST_CASE("level-2 with N = m*k^2 partitions the population") {
  const Population pop = Population::grid(4, DistributionKind::StandardUniform);
  const DesignSpec spec = DesignSpec::balanced(Design::Level2, 2, 1);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream rng(seed);
    const RankedSetSample sample = draw_rss(pop, spec, Ranking::Perfect, rng);
    std::set<int> all;
    for (const auto& e : sample.entries) all.insert(e.unit);
    CHECK(static_cast<int>(all.size()) == 4);  // the two sets partition the population
    // set 1 yields its minimum, set 2 its maximum
    std::vector<int> set1, set2;
    for (const auto& e : sample.entries)
      (e.set_index == 1 ? set1 : set2).push_back(e.unit);
    for (const auto& e : sample.measured_entries()) {
      if (e.set_index == 1) CHECK(e.unit == *std::min_element(set1.begin(), set1.end()));
      if (e.set_index == 2) CHECK(e.unit == *std::max_element(set2.begin(), set2.end()));
    }
  }
}

TEST_CASE("level-1 measured units are distinct over many replications") {
  const Population pop = Population::grid(5, DistributionKind::StandardUniform);
  const DesignSpec spec = DesignSpec::balanced(Design::Level1, 2, 1);
  for (int rep = 0; rep < 10000; ++rep) {
    RandomStream rng = RandomStream::substream(77, static_cast<std::uint64_t>(rep));
    const auto sample = draw_rss(pop, spec, Ranking::Perfect, rng);
    const auto measured = sample.measured_entries();
    REQUIRE(measured.size() == 2);
    CHECK(measured[0].unit != measured[1].unit);
  }
}

TEST_CASE("replacement bookkeeping leaves the right pool sizes") {
  const Population pop = Population::grid(30, DistributionKind::StandardNormal);
  RandomStream rng(4);
  // level-2: all m*k^2 ranked units distinct
  const auto l2 = draw_rss(pop, DesignSpec::balanced(Design::Level2, 3, 3), Ranking::Perfect, rng);
  std::set<int> l2_units;
  for (const auto& e : l2.entries) l2_units.insert(e.unit);
  CHECK(static_cast<int>(l2_units.size()) == 27);
  // level-1: measured distinct; ranked-but-unmeasured units may reappear
  const auto l1 = draw_rss(pop, DesignSpec::balanced(Design::Level1, 3, 3), Ranking::Perfect, rng);
  std::set<int> l1_measured;
  for (const auto& e : l1.measured_entries()) l1_measured.insert(e.unit);
  CHECK(static_cast<int>(l1_measured.size()) == 9);
}

TEST_CASE("measured value is the r-th order statistic of its set") {
  const Population pop = Population::grid(12, DistributionKind::Beta52);
  const DesignSpec spec = DesignSpec::balanced(Design::Level1, 3, 2);
  RandomStream rng(10);
  const RankedSetSample sample = draw_rss(pop, spec, Ranking::Perfect, rng);
  for (int h = 1; h <= spec.sample_size(); ++h) {
    std::vector<double> values;
    double measured_value = 0.0;
    for (const auto& e : sample.entries)
      if (e.set_index == h) {
        values.push_back(e.value);
        if (e.measured) measured_value = e.value;
      }
    std::sort(values.begin(), values.end());
    const int r = spec.rank_pattern[static_cast<std::size_t>(h - 1)];
    CHECK(measured_value == values[static_cast<std::size_t>(r - 1)]);
  }
}

TEST_CASE("balanced pattern measures each rank m times") {
  const Population pop = Population::grid(40, DistributionKind::StandardNormal);
  const DesignSpec spec = DesignSpec::balanced(Design::Level1, 4, 3);
  RandomStream rng(21);
  const auto sample = draw_rss(pop, spec, Ranking::Perfect, rng);
  std::map<int, int> rank_counts;
  for (const auto& e : sample.measured_entries()) ++rank_counts[e.in_set_rank];
  for (int r = 1; r <= 4; ++r) CHECK(rank_counts[r] == 3);
}

TEST_CASE("auxiliary ranking with rho=1 matches perfect ranking draw for draw") {
  const Population base = Population::grid(15, DistributionKind::StandardExponential);
  RandomStream aux_rng(2);
  const Population judged = base.with_auxiliary(1.0, aux_rng);
  const DesignSpec spec = DesignSpec::balanced(Design::Level1, 3, 2);
  for (std::uint64_t seed : {1ull, 8ull, 123ull}) {
    RandomStream r1(seed), r2(seed);
    const auto perfect = draw_rss(judged, spec, Ranking::Perfect, r1);
    const auto byaux = draw_rss(judged, spec, Ranking::ByAuxiliary, r2);
    REQUIRE(perfect.entries.size() == byaux.entries.size());
    for (std::size_t i = 0; i < perfect.entries.size(); ++i) {
      CHECK(perfect.entries[i].unit == byaux.entries[i].unit);
      CHECK(perfect.entries[i].measured == byaux.entries[i].measured);
    }
  }
}

TEST_CASE("auxiliary ranking without an auxiliary errors") {
  const Population pop = Population::grid(10, DistributionKind::StandardNormal);
  RandomStream rng(0);
  CHECK_THROWS_AS(
      (void)draw_rss(pop, DesignSpec::balanced(Design::Level0, 2, 1), Ranking::ByAuxiliary, rng),
      std::invalid_argument);
}

TEST_CASE("infeasible draw errors") {
  const Population pop = Population::grid(10, DistributionKind::StandardNormal);
  RandomStream rng(0);
  CHECK_THROWS_AS(
      (void)draw_rss(pop, DesignSpec::balanced(Design::Level2, 3, 2), Ranking::Perfect, rng),
      infeasible_design_error);
}
