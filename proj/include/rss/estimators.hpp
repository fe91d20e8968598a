#pragma once

#include <vector>

#include "rss/inclusion.hpp"
#include "rss/population.hpp"

namespace rss {

enum class QuantileRule { Step, Interpolated };
// Whether repeated measurements of one population unit (possible under
// level-0) enter the estimator once or per occurrence.
enum class DuplicatePolicy { DistinctUnits, Multiset };

// A normalized weighted step function; right-continuous, reaching exactly 1
// at the largest measured value.
class EdfEstimate {
 public:
  // points: (value, weight) per measured unit, weights > 0 (unnormalized).
  explicit EdfEstimate(std::vector<std::pair<double, double>> points);

  double value(double x) const;

  // Step: smallest support value whose EDF is >= p.
  // Interpolated: piecewise-linear inverse through the per-unit points
  // (reduces to the usual h = (n-1)p + 1 interpolation for equal weights).
  double quantile(double p, QuantileRule rule = QuantileRule::Step) const;

  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& cumulative() const { return cum_; }
  int point_count() const { return static_cast<int>(unit_values_.size()); }

 private:
  std::vector<double> support_;      // distinct values, ascending
  std::vector<double> cum_;          // normalized cumulative weights
  std::vector<double> unit_values_;  // per-unit values, ascending
  std::vector<double> unit_cum_;     // per-unit normalized cumulative weights
};

// Inverse-inclusion-probability weighted EDF normalized by the summed
// weights; the sum runs over distinct sampled units by default.
EdfEstimate hajek_edf(const RankedSetSample& sample, const InclusionTable& table,
                      DuplicatePolicy dup = DuplicatePolicy::DistinctUnits);

// Plain mean of indicators over all m*k measurements (classical RSS EDF).
EdfEstimate unweighted_edf(const RankedSetSample& sample);

// Its design variance (1/(mk^2)) sum_r F_(r)(x)(1 - F_(r)(x)) with F_(r)
// the CDF of the r-th ranked unit of one drawn set; exact for independent
// sets (level-0).
double unweighted_edf_variance(const Population& pop, int set_size, int cycles, double x);

// Design variance of the weighted EDF from the full double sum
//   N^-2 sum_ii' (pi_ii' - pi_i pi_i') e_i(x) e_i'(x),
// e_i(x) = (1{X_i<=x} - F(x)) / pi_i.  Deterministic fixed-order reduction.
double true_variance(const Population& pop, const InclusionTable& table, double x,
                     Exec exec = Exec::Parallel);

// Closed form (N-n)/(N-1) * F(1-F)/n for simple random sampling.
double srs_variance_closed_form(int N, int n, double F);

// Sen-Yates-Grundy style variance estimate from the sample alone:
//   -(1/2) (sum_i 1/pi_i)^-2 sum_ii' [(pi_ii'-pi_i pi_i')/pi_ii'] (u_i-u_i')^2.
// May be negative for some second-order structures; returned as computed.
double syg_variance_estimate(const RankedSetSample& sample, const InclusionTable& table,
                             double x, DuplicatePolicy dup = DuplicatePolicy::DistinctUnits);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool truncated = false;  // set when the normal interval left [0, 1]
};

// fhat +- z_{alpha/2} sqrt(vhat), truncated to [0, 1].
Interval pointwise_ci(double fhat, double vhat, double alpha);

struct MedianCi {
  double median = 0.0;     // step-inverse of the EDF at 0.5
  double vhat = 0.0;       // variance estimate at the median
  double c1 = 0.0, c2 = 0.0;
  double lo = 0.0, hi = 0.0;
};

// Confidence interval for the population median: c bounds from the normal
// approximation at the estimated median, inverted through the EDF with the
// requested rule.  Errors when c1 <= 0 or c2 >= 1.
MedianCi median_ci(const RankedSetSample& sample, const InclusionTable& table,
                   double alpha, QuantileRule rule = QuantileRule::Step);

// Expected-order-statistic population ranks round(j (N+1)/(n+1)) for the
// j-th smallest of n measured values; used when true unit labels are
// unknown (field data).  Returned per input value (ties resolved by input
// order), 1-based, strictly increasing.
std::vector<int> assign_expected_ranks(const std::vector<double>& values, int N);

}  // namespace rss
