#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rss/designs.hpp"

namespace rss {

// One fully drawn design outcome under perfect ranking: the member units of
// every set (ascending = judged order) and the measured unit per set.
struct SetOutcome {
  std::vector<int> members;  // 0-based unit indexes, ascending
  int measured;              // 0-based unit index
};

using OutcomeVisitor = std::function<void(double prob, const std::vector<SetOutcome>&)>;

// Walks every possible draw sequence of the design on units {0..N-1},
// applying the design's replacement rule between sets, and calls the
// visitor with each outcome's probability.  Probabilities sum to one.
// Throws budget_exceeded_error when the outcome count would pass the budget.
void enumerate_outcomes(int N, const DesignSpec& spec, const OutcomeVisitor& visit,
                        std::uint64_t outcome_budget = 20'000'000);

// Exact mean and variance of a per-outcome statistic over the full design
// distribution.
struct ExactMoments {
  double mean = 0.0;
  double variance = 0.0;
};
ExactMoments enumerate_statistic_moments(
    int N, const DesignSpec& spec,
    const std::function<double(const std::vector<SetOutcome>&)>& statistic,
    std::uint64_t outcome_budget = 20'000'000);

}  // namespace rss
