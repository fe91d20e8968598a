#pragma once

#include <string>
#include <vector>

#include "rss/estimators.hpp"
#include "rss/population.hpp"

namespace rss {

// Exhaustive verification of the variance decomposition of the unweighted
// RSS mean at one evaluation point:
//   (mk)^2 V = m sum_r sigma_r^2 + m^2 sum_rs C(r,s) - m sum_r C(r,r)
// with sigma_r^2 the indicator variance of the rank-r measurement and
// C(r,s) the cross-set covariance between rank-r and rank-s measurements.
// Also carries the companion checks: within-set covariances (one ranked
// set, two order statistics) must be non-negative and reproduce the SRS
// closed form when summed, cross-set covariances must be non-positive, and
// the weighted-EDF variance must not exceed its SRS counterpart.
struct DecompositionReport {
  DesignSpec spec;
  int population_size = 0;
  double x = 0.0;
  double f_pop = 0.0;

  double enumerated_variance = 0.0;  // exact variance of the unweighted mean
  double decomposed_variance = 0.0;  // right-hand side of the identity
  double identity_residual = 0.0;

  std::vector<double> sigma_r;                  // k entries
  std::vector<std::vector<double>> cross_cov;   // k x k grouped C(r,s)
  std::vector<std::vector<double>> within_cov;  // k x k same-set covariances
  std::vector<std::vector<double>> rank_position_prob;  // nabla_r over units

  double max_cross_set_cov = 0.0;  // sign check: expected <= 0
  double min_within_cov = 0.0;     // sign check: expected >= 0
  double partition_identity_residual = 0.0;  // SRS(n=k) vs within-set decomposition

  double weighted_variance_design = 0.0;  // full double-sum variance, this design
  double weighted_variance_srs = 0.0;     // same point under SRS at matched n
  double closed_form_cross_residual = -1.0;  // level-2 only: walker vs closed form

  double mean_inverse_pi_sum = 0.0;  // E[sum_{i in D} 1/pi_i]; N for fixed-size designs

  bool pass(double tol) const;
  std::string summary() const;
};

DecompositionReport variance_decomposition_report(const Population& pop,
                                                  const DesignSpec& spec, double x,
                                                  std::uint64_t outcome_budget = 20'000'000,
                                                  std::uint64_t state_budget = 200'000'000);

}  // namespace rss
