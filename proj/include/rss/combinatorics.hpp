#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace rss {

// Table of log-factorials up to a fixed n, shared by the inclusion kernels.
class LogFact {
 public:
  explicit LogFact(int n_max) : lf_(static_cast<std::size_t>(n_max) + 1) {
    for (int n = 0; n <= n_max; ++n) lf_[static_cast<std::size_t>(n)] = std::lgamma(n + 1.0);
  }

  // log C(n, k); -inf outside combinatorial support (the C(a,b)=0 convention).
  double lchoose(int n, int k) const {
    if (k < 0 || n < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return lf_[static_cast<std::size_t>(n)] - lf_[static_cast<std::size_t>(k)] -
           lf_[static_cast<std::size_t>(n - k)];
  }

  double choose(int n, int k) const {
    const double l = lchoose(n, k);
    return std::isinf(l) ? 0.0 : std::exp(l);
  }

 private:
  std::vector<double> lf_;
};

}  // namespace rss
