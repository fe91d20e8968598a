#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rss/designs.hpp"
#include "rss/parallel.hpp"

namespace rss {

enum class TableMethod { ClosedForm, ExactEnumeration, MonteCarlo };

std::string method_name(TableMethod m);
TableMethod method_from_name(const std::string& name);

// First- and second-order inclusion probabilities of a design on a
// population of size N, indexed by position in the consistent ranking
// (0-based unit index).  The second-order matrix is symmetric with the
// first-order vector on its diagonal.
struct InclusionTable {
  int population_size = 0;
  DesignSpec spec;
  TableMethod method = TableMethod::ClosedForm;
  std::vector<double> first;    // size N
  std::vector<double> second;   // N*N, row-major
  std::vector<double> first_se;   // Monte Carlo only
  std::vector<double> second_se;  // Monte Carlo only
  std::uint64_t mc_reps = 0;

  double pi(int unit) const { return first[static_cast<std::size_t>(unit)]; }
  double pi_pair(int a, int b) const {
    return second[static_cast<std::size_t>(a) * static_cast<std::size_t>(population_size) +
                  static_cast<std::size_t>(b)];
  }
  double& pi_pair_ref(int a, int b) {
    return second[static_cast<std::size_t>(a) * static_cast<std::size_t>(population_size) +
                  static_cast<std::size_t>(b)];
  }
  double sum_first() const;
  // Throws verification_error unless 0 < pi_i <= 1+tol and the matrix is
  // symmetric and dominated by min(pi_i, pi_j).
  void check_basic_invariants(double tol = 1e-9) const;
};

// P(the i-th ranked of N population units takes rank r in a uniformly drawn
// set of size k); the hypergeometric-style ratio C(i-1,r-1) C(N-i,k-r) / C(N,k).
double order_statistic_prob(int i, int r, int k, int N);

InclusionTable srs_inclusion(int N, int n);

// Product-form probabilities for the with-full-replacement design.
InclusionTable level0_inclusion(const DesignSpec& spec, int N, Exec exec = Exec::Parallel);

// Closed-form probabilities for the remove-whole-set design; first order is
// sum_h I(i; r_h, k, N) (constant n/N for balanced patterns), second order
// sums the two-set overlap decomposition over ordered set pairs.
InclusionTable level2_inclusion(const DesignSpec& spec, int N, Exec exec = Exec::Parallel);

// Exact probabilities for the remove-measured-unit design via dynamic
// programming over the counts of removed units below / between the target
// units.  Cost is budgeted in DP states; past the budget a
// budget_exceeded_error asks the caller to use Monte Carlo instead.
InclusionTable level1_inclusion(const DesignSpec& spec, int N,
                                std::uint64_t state_budget = 10'000'000,
                                Exec exec = Exec::Parallel);

// Empirical inclusion frequencies over `reps` independent draws with
// perfect ranking; the universal cross-check for every closed form.
// Bit-identical for a fixed seed regardless of thread count.
InclusionTable mc_inclusion(int N, const DesignSpec& spec, std::uint64_t reps,
                            std::uint64_t seed, Exec exec = Exec::Parallel);

// Exact probabilities by exhaustive enumeration of every possible draw
// sequence (tiny instances only; budget counts leaf outcomes).
InclusionTable enumerate_inclusion(int N, const DesignSpec& spec,
                                   std::uint64_t outcome_budget = 20'000'000);

// Dispatcher used by the CLI.
InclusionTable compute_inclusion(const DesignSpec& spec, int N, TableMethod method,
                                 std::uint64_t reps, std::uint64_t seed,
                                 Exec exec = Exec::Parallel);

class LogFact;

namespace detail {
// Joint probability that unit i is measured at rank r in one set and unit
// ip (> i) at rank s in a different set of the remove-whole-set design.
double level2_pair_term(int i, int ip, int r, int s, int k, int N, const LogFact& lf);
}  // namespace detail

}  // namespace rss
