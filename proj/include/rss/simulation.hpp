#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rss/designs.hpp"
#include "rss/distributions.hpp"
#include "rss/estimators.hpp"
#include "rss/population.hpp"

namespace rss {

// One Monte Carlo / exact-variance experiment: a quantile-grid population,
// a list of designs at common (m, k), a ranking-error correlation and a
// probability grid.  Identical configs (including the master seed) give
// bit-identical results for any worker count.
struct SimulationConfig {
  int population_size = 20;
  DistributionKind dist = DistributionKind::StandardNormal;
  std::vector<Design> designs{Design::Srs, Design::Level0, Design::Level1, Design::Level2};
  int set_size = 2;
  int cycles = 1;
  std::vector<int> rank_pattern;  // empty = balanced
  double rho = 1.0;               // 1.0 = perfect ranking
  std::uint64_t reps = 10000;
  std::vector<double> p_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::uint64_t master_seed = 0;

  DesignSpec spec_for(Design d) const;
  void validate_feasible() const;
};

struct RERow {
  Design design;
  double p = 0.0;
  double x_p = 0.0;
  double f_true = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;
  double re = 0.0;     // SRS variance over this design's variance (or MSE)
  double re_se = 0.0;  // batch standard error; 0 in exact mode
  bool exact = false;
};

struct REResult {
  SimulationConfig config;
  std::vector<RERow> rows;

  const RERow& at(Design d, double p) const&;
  // rvalue overload copies, so rows taken off a temporary result stay valid
  RERow at(Design d, double p) const&&;
};

// Perfect-ranking relative efficiencies.  Where exact inclusion tables are
// available (closed forms; level-1 recursion within the state budget) the
// variances are deterministic functionals; otherwise that design falls back
// to Monte Carlo with `mc_fallback_reps` replications.
REResult run_perfect_re(const SimulationConfig& config, Exec exec = Exec::Parallel,
                        std::uint64_t mc_fallback_reps = 100000,
                        std::uint64_t level1_state_budget = 10'000'000);

// Imperfect-ranking study: each replication regenerates the auxiliary
// variable, redraws every design by judged ranks, and the relative
// efficiency is empirical Var[SRS] over empirical MSE[design].
REResult run_imperfect_re(const SimulationConfig& config, Exec exec = Exec::Parallel,
                          std::uint64_t level1_state_budget = 10'000'000);

struct InvarianceReport {
  std::vector<RERow> reference;  // rows for the first distribution
  double max_spread = 0.0;       // max |RE_dist - RE_reference| over all cells
  bool pass(double tol) const { return max_spread <= tol; }
};

// Perfect-ranking REs are rank functionals, so the generating distribution
// must not matter; measures the spread across all four reference kinds.
InvarianceReport distribution_invariance_check(int N, int m, int k,
                                               const std::vector<double>& p_grid,
                                               Exec exec = Exec::Parallel);

std::string results_csv(const REResult& result);

}  // namespace rss
