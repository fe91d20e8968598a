#include "rss/population.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rss {

Population::Population(std::vector<double> x, std::optional<std::vector<double>> aux)
    : x_(std::move(x)), aux_(std::move(aux)) {
  if (x_.empty()) throw std::invalid_argument("population must have at least one unit");
  if (!std::is_sorted(x_.begin(), x_.end()))
    throw std::invalid_argument("population values must be non-decreasing in id");
  const int n = size();
  ranks_.resize(static_cast<std::size_t>(n));
  if (aux_) {
    if (static_cast<int>(aux_->size()) != n)
      throw std::invalid_argument("auxiliary variable must have one entry per unit");
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const std::vector<double>& y = *aux_;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return y[static_cast<std::size_t>(a)] < y[static_cast<std::size_t>(b)];
    });  // stable sort breaks ties by smaller id
    for (int pos = 0; pos < n; ++pos) ranks_[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos + 1;
  } else {
    std::iota(ranks_.begin(), ranks_.end(), 1);
  }
}

Population Population::grid(int n, DistributionKind kind) {
  if (n < 1) throw std::invalid_argument("grid population needs n >= 1");
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int g = 1; g <= n; ++g)
    x[static_cast<std::size_t>(g - 1)] = quantile(kind, (g - 0.5) / n);
  return Population(std::move(x));
}

Population Population::with_auxiliary(double rho, RandomStream& rng) const {
  if (rho < -1.0 || rho > 1.0) throw std::invalid_argument("rho must lie in [-1, 1]");
  const double sd = stddev();
  if (sd <= 0.0)
    throw std::domain_error("cannot standardize a constant population (sd == 0)");
  const double mu = mean();
  const int n = size();
  const double noise = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  std::vector<double> y(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    const double z = rng.normal();
    y[static_cast<std::size_t>(u)] = rho * (x_[static_cast<std::size_t>(u)] - mu) / sd + noise * z;
  }
  return Population(x_, std::move(y));
}

double Population::edf(double value) const {
  return static_cast<double>(count_at_most(value)) / size();
}

int Population::count_at_most(double value) const {
  return static_cast<int>(std::upper_bound(x_.begin(), x_.end(), value) - x_.begin());
}

double Population::quantile_value(double p) const {
  if (p < 0.0 || p > 1.0) throw std::domain_error("quantile_value: p must be in [0,1]");
  const int n = size();
  for (int u = 0; u < n; ++u) {
    if (edf(x_[static_cast<std::size_t>(u)]) >= p - 1e-12) return x_[static_cast<std::size_t>(u)];
  }
  return x_.back();
}

double Population::mean() const {
  return std::accumulate(x_.begin(), x_.end(), 0.0) / size();
}

double Population::stddev() const {
  const double mu = mean();
  double ss = 0.0;
  for (double v : x_) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / size());
}

}  // namespace rss
