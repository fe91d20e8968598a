#pragma once

#include <optional>
#include <vector>

#include "rss/distributions.hpp"
#include "rss/rng.hpp"

namespace rss {

// A finite population of N units labeled 1..N in non-decreasing order of the
// study variable.  An optional auxiliary variable carries the judgment
// ranking used when in-set ranking is error prone.  Immutable once built.
class Population {
 public:
  // x must be non-decreasing; aux (if given) must have the same length.
  explicit Population(std::vector<double> x,
                      std::optional<std::vector<double>> aux = std::nullopt);

  // Values placed at the (gamma - 0.5)/N quantiles of the reference
  // distribution; deterministic, judgment ranks are the identity.
  static Population grid(int n, DistributionKind kind);

  // Returns a copy with auxiliary values
  //   y = rho * (x - mean) / sd + sqrt(1 - rho^2) * z,   z ~ N(0,1) iid,
  // where mean/sd are the finite-population moments (variance over N).
  // Judgment ranks are recomputed from y with ties broken by smaller id.
  // Throws std::domain_error when the population is constant (sd == 0).
  Population with_auxiliary(double rho, RandomStream& rng) const;

  int size() const { return static_cast<int>(x_.size()); }
  double x(int unit) const { return x_[static_cast<std::size_t>(unit)]; }
  const std::vector<double>& values() const { return x_; }
  bool has_auxiliary() const { return aux_.has_value(); }
  const std::vector<double>& auxiliary() const { return *aux_; }

  // judgment_rank(u) in 1..N; a permutation.  Identity when no auxiliary.
  int judgment_rank(int unit) const { return ranks_[static_cast<std::size_t>(unit)]; }
  const std::vector<int>& judgment_ranks() const { return ranks_; }

  // Finite-population distribution function (1/N) * #{X_i <= value}.
  double edf(double value) const;
  int count_at_most(double value) const;

  // Smallest population value whose EDF is >= p.
  double quantile_value(double p) const;

  double mean() const;
  double stddev() const;  // divisor N

 private:
  std::vector<double> x_;
  std::optional<std::vector<double>> aux_;
  std::vector<int> ranks_;
};

}  // namespace rss
