#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "rss/population.hpp"

using namespace rss;

TEST_CASE("grid population hits the shifted quantiles") {
  const Population one = Population::grid(1, DistributionKind::StandardUniform);
  CHECK(one.x(0) == doctest::Approx(0.5).epsilon(1e-15));

  const Population four = Population::grid(4, DistributionKind::StandardUniform);
  const double expected[] = {0.125, 0.375, 0.625, 0.875};
  for (int u = 0; u < 4; ++u) CHECK(four.x(u) == doctest::Approx(expected[u]).epsilon(1e-15));

  const Population normal = Population::grid(20, DistributionKind::StandardNormal);
  CHECK(normal.x(0) == doctest::Approx(-1.9599639845400545).epsilon(1e-12));
}

TEST_CASE("grid population is deterministic and identity-ranked") {
  const Population a = Population::grid(50, DistributionKind::Beta52);
  const Population b = Population::grid(50, DistributionKind::Beta52);
  for (int u = 0; u < 50; ++u) {
    CHECK(a.x(u) == b.x(u));
    CHECK(a.judgment_rank(u) == u + 1);
  }
}

TEST_CASE("reference quantiles match frozen external values") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(normal_quantile(0.9) == doctest::Approx(1.2815515655446004).epsilon(1e-13));
  CHECK(normal_quantile(0.3) == doctest::Approx(-0.5244005127080409).epsilon(1e-13));
  CHECK(normal_quantile(1e-6) == doctest::Approx(-4.753424308822899).epsilon(1e-12));
  CHECK(quantile(DistributionKind::StandardExponential, 0.73) ==
        doctest::Approx(1.3093333199837622).epsilon(1e-13));
  // scipy.stats.beta.ppf(p, 5, 2)
  CHECK(quantile(DistributionKind::Beta52, 0.5) ==
        doctest::Approx(0.73555001670434).epsilon(1e-10));
  CHECK(quantile(DistributionKind::Beta52, 0.1) ==
        doctest::Approx(0.4896836934485084).epsilon(1e-10));
  CHECK(quantile(DistributionKind::Beta52, 0.975) ==
        doctest::Approx(0.9567281317072583).epsilon(1e-10));
  // quantile/CDF round trip
  for (double p : {0.001, 0.2, 0.5, 0.77, 0.999})
    CHECK(beta52_cdf(quantile(DistributionKind::Beta52, p)) ==
          doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("population edf is a step function with the expected values") {
  const Population pop = Population::grid(4, DistributionKind::StandardUniform);
  CHECK(pop.edf(0.1) == 0.0);
  CHECK(pop.edf(0.875) == 1.0);
  CHECK(pop.edf(10.0) == 1.0);
  CHECK(pop.edf(0.375) == doctest::Approx(0.5));
  CHECK(pop.edf(0.3749999) == doctest::Approx(0.25));
  // right-continuity and non-decreasing over a sweep
  double prev = -1.0;
  for (double x = -0.2; x < 1.2; x += 0.01) {
    const double f = pop.edf(x);
    CHECK(f >= prev);
    prev = f;
  }
}

TEST_CASE("auxiliary with rho=1 reproduces the study ranking") {
  const Population pop = Population::grid(30, DistributionKind::StandardExponential);
  for (std::uint64_t seed : {1ull, 7ull, 99ull}) {
    RandomStream rng(seed);
    const Population judged = pop.with_auxiliary(1.0, rng);
    for (int u = 0; u < 30; ++u) CHECK(judged.judgment_rank(u) == u + 1);
  }
}

TEST_CASE("auxiliary ranks always form a permutation") {
  const Population pop = Population::grid(25, DistributionKind::StandardNormal);
  for (double rho : {-1.0, -0.3, 0.0, 0.5, 0.9}) {
    RandomStream rng(static_cast<std::uint64_t>(rho * 1000) + 5);
    const Population judged = pop.with_auxiliary(rho, rng);
    std::set<int> seen(judged.judgment_ranks().begin(), judged.judgment_ranks().end());
    CHECK(static_cast<int>(seen.size()) == 25);
    CHECK(*seen.begin() == 1);
    CHECK(*seen.rbegin() == 25);
  }
}

TEST_CASE("auxiliary correlation matches rho on average") {
  const int reps = 10000;
  const Population pop = Population::grid(100, DistributionKind::StandardNormal);
  for (double rho : {0.0, 0.9}) {
    RandomStream rng(rho == 0.0 ? 11u : 12u);
    std::vector<double> corr;
    corr.reserve(reps);
    for (int rep = 0; rep < reps; ++rep) {
      const Population judged = pop.with_auxiliary(rho, rng);
      corr.push_back(oracles::pearson(pop.values(), judged.auxiliary()));
    }
    const oracles::Moments m = oracles::moments(corr);
    // the sample correlation has an O(1/N) finite-population bias on top of
    // the Monte Carlo error
    CHECK(std::fabs(m.mean - rho) < 3.0 * m.se_mean + 3e-3);
  }
}

TEST_CASE("constant population cannot be standardized") {
  RandomStream rng(1);
  const Population pop(std::vector<double>{2.0, 2.0, 2.0});
  CHECK_THROWS_AS((void)pop.with_auxiliary(0.5, rng), std::domain_error);
}

TEST_CASE("population quantile value is the smallest value reaching p") {
  const Population pop = Population::grid(20, DistributionKind::StandardUniform);
  CHECK(pop.quantile_value(0.5) == pop.x(9));
  CHECK(pop.quantile_value(0.05) == pop.x(0));
  CHECK(pop.quantile_value(1.0) == pop.x(19));
}
