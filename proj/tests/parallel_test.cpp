#include <doctest.h>

#include "rss/estimators.hpp"
#include "rss/inclusion.hpp"
#include "rss/simulation.hpp"

using namespace rss;

// The OpenMP kernels must be bit-identical to their serial reference paths.

namespace {

void check_tables_identical(const InclusionTable& a, const InclusionTable& b) {
  REQUIRE(a.first.size() == b.first.size());
  for (std::size_t i = 0; i < a.first.size(); ++i) CHECK(a.first[i] == b.first[i]);
  for (std::size_t i = 0; i < a.second.size(); ++i) CHECK(a.second[i] == b.second[i]);
}

}  // namespace

TEST_CASE("inclusion kernels match serial reference bit for bit") {
  const DesignSpec l0 = DesignSpec::balanced(Design::Level0, 3, 2);
  check_tables_identical(level0_inclusion(l0, 40, Exec::Serial),
                         level0_inclusion(l0, 40, Exec::Parallel));
  const DesignSpec l2 = DesignSpec::balanced(Design::Level2, 3, 2);
  check_tables_identical(level2_inclusion(l2, 40, Exec::Serial),
                         level2_inclusion(l2, 40, Exec::Parallel));
  const DesignSpec l1 = DesignSpec::balanced(Design::Level1, 2, 2);
  check_tables_identical(level1_inclusion(l1, 30, 10'000'000, Exec::Serial),
                         level1_inclusion(l1, 30, 10'000'000, Exec::Parallel));
}

TEST_CASE("monte carlo kernels match serial reference bit for bit") {
  const DesignSpec spec = DesignSpec::balanced(Design::Level2, 2, 2);
  check_tables_identical(mc_inclusion(12, spec, 3000, 77, Exec::Serial),
                         mc_inclusion(12, spec, 3000, 77, Exec::Parallel));
}

TEST_CASE("variance kernel matches serial reference bit for bit") {
  const Population pop = Population::grid(60, DistributionKind::StandardNormal);
  const InclusionTable table = level2_inclusion(DesignSpec::balanced(Design::Level2, 3, 2), 60);
  for (int d = 1; d <= 9; d += 2) {
    const double x = pop.quantile_value(d / 10.0);
    CHECK(true_variance(pop, table, x, Exec::Serial) ==
          true_variance(pop, table, x, Exec::Parallel));
  }
}

TEST_CASE("simulation engine matches serial reference bit for bit") {
  SimulationConfig cfg;
  cfg.population_size = 16;
  cfg.set_size = 2;
  cfg.cycles = 2;
  cfg.rho = 0.9;
  cfg.reps = 400;
  cfg.master_seed = 21;
  const REResult a = run_imperfect_re(cfg, Exec::Serial);
  const REResult b = run_imperfect_re(cfg, Exec::Parallel);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].bias == b.rows[i].bias);
    CHECK(a.rows[i].variance == b.rows[i].variance);
    CHECK(a.rows[i].mse == b.rows[i].mse);
    CHECK(a.rows[i].re == b.rows[i].re);
    CHECK(a.rows[i].re_se == b.rows[i].re_se);
  }
}
