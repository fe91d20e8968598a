#include "rss/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rss/errors.hpp"

namespace rss {

EdfEstimate::EdfEstimate(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw std::invalid_argument("EDF needs at least one point");
  std::sort(points.begin(), points.end());
  double total = 0.0;
  for (const auto& p : points) {
    if (!(p.second > 0.0)) throw std::invalid_argument("EDF weights must be positive");
    total += p.second;
  }
  unit_values_.reserve(points.size());
  unit_cum_.reserve(points.size());
  double run = 0.0;
  for (const auto& p : points) {
    run += p.second;
    unit_values_.push_back(p.first);
    unit_cum_.push_back(run / total);  // final entry is total/total == 1
  }
  for (std::size_t j = 0; j < unit_values_.size(); ++j) {
    if (j + 1 < unit_values_.size() && unit_values_[j + 1] == unit_values_[j]) continue;
    support_.push_back(unit_values_[j]);
    cum_.push_back(unit_cum_[j]);
  }
}

double EdfEstimate::value(double x) const {
  const auto it = std::upper_bound(support_.begin(), support_.end(), x);
  if (it == support_.begin()) return 0.0;
  return cum_[static_cast<std::size_t>(it - support_.begin() - 1)];
}

double EdfEstimate::quantile(double p, QuantileRule rule) const {
  if (p < 0.0 || p > 1.0) throw std::domain_error("quantile: p must be in [0,1]");
  if (rule == QuantileRule::Step) {
    for (std::size_t j = 0; j < support_.size(); ++j)
      if (cum_[j] >= p - 1e-9) return support_[j];
    return support_.back();
  }
  // Piecewise-linear inverse with nodes p_j = (c_j - c_1) / (1 - c_1); for
  // equal weights this is the classical (n-1)p + 1 interpolation.
  const std::size_t n = unit_values_.size();
  if (n == 1) return unit_values_[0];
  const double c1 = unit_cum_[0];
  auto node = [&](std::size_t j) { return (unit_cum_[j] - c1) / (1.0 - c1); };
  if (p <= 0.0) return unit_values_[0];
  if (p >= 1.0) return unit_values_[n - 1];
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double a = node(j), b = node(j + 1);
    if (p <= b + 1e-15) {
      if (b <= a) return unit_values_[j + 1];
      const double t = std::clamp((p - a) / (b - a), 0.0, 1.0);
      return unit_values_[j] + t * (unit_values_[j + 1] - unit_values_[j]);
    }
  }
  return unit_values_[n - 1];
}

namespace {

std::vector<SampleEntry> estimator_entries(const RankedSetSample& sample,
                                           DuplicatePolicy dup) {
  return dup == DuplicatePolicy::DistinctUnits ? sample.distinct_measured()
                                               : sample.measured_entries();
}

double pi_of(const InclusionTable& table, const SampleEntry& e) {
  const int idx = e.weight_rank - 1;
  if (idx < 0 || idx >= table.population_size)
    throw std::invalid_argument("sampled unit rank outside the inclusion table");
  const double p = table.pi(idx);
  if (!(p > 0.0))
    throw std::domain_error("sampled unit has zero inclusion probability");
  return p;
}

}  // namespace

EdfEstimate hajek_edf(const RankedSetSample& sample, const InclusionTable& table,
                      DuplicatePolicy dup) {
  std::vector<std::pair<double, double>> points;
  for (const auto& e : estimator_entries(sample, dup))
    points.emplace_back(e.value, 1.0 / pi_of(table, e));
  return EdfEstimate(std::move(points));
}

EdfEstimate unweighted_edf(const RankedSetSample& sample) {
  std::vector<std::pair<double, double>> points;
  for (const auto& e : sample.measured_entries()) points.emplace_back(e.value, 1.0);
  return EdfEstimate(std::move(points));
}

double unweighted_edf_variance(const Population& pop, int set_size, int cycles, double x) {
  const int N = pop.size();
  double total = 0.0;
  for (int r = 1; r <= set_size; ++r) {
    double fr = 0.0;
    for (int i = 1; i <= N; ++i)
      if (pop.x(i - 1) <= x) fr += order_statistic_prob(i, r, set_size, N);
    total += fr * (1.0 - fr);
  }
  return total / (static_cast<double>(cycles) * set_size * set_size);
}

double true_variance(const Population& pop, const InclusionTable& table, double x,
                     Exec exec) {
  const int N = pop.size();
  if (table.population_size != N)
    throw std::invalid_argument("inclusion table does not cover the population");
  const double F = pop.edf(x);
  std::vector<double> resid(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i)
    resid[static_cast<std::size_t>(i)] = ((pop.x(i) <= x ? 1.0 : 0.0) - F) / table.pi(i);
  std::vector<double> row_sum(static_cast<std::size_t>(N), 0.0);
  for_index(N, exec, [&](std::int64_t i) {
    double acc = 0.0;
    const int ii = static_cast<int>(i);
    for (int j = 0; j < N; ++j)
      acc += (table.pi_pair(ii, j) - table.pi(ii) * table.pi(j)) *
             resid[static_cast<std::size_t>(ii)] * resid[static_cast<std::size_t>(j)];
    row_sum[static_cast<std::size_t>(i)] = acc;
  });
  double total = 0.0;  // fixed-order reduction keeps the result thread-count independent
  for (int i = 0; i < N; ++i) total += row_sum[static_cast<std::size_t>(i)];
  return total / (static_cast<double>(N) * N);
}

double srs_variance_closed_form(int N, int n, double F) {
  if (n < 1 || n > N) throw std::domain_error("srs_variance_closed_form: need 1 <= n <= N");
  if (F < 0.0 || F > 1.0) throw std::domain_error("srs_variance_closed_form: F in [0,1]");
  if (N == 1) return 0.0;
  return (static_cast<double>(N - n) / (N - 1)) * F * (1.0 - F) / n;
}

double syg_variance_estimate(const RankedSetSample& sample, const InclusionTable& table,
                             double x, DuplicatePolicy dup) {
  const std::vector<SampleEntry> units = estimator_entries(sample, dup);
  const std::size_t d = units.size();
  if (d == 0) throw std::invalid_argument("variance estimate needs a non-empty sample");
  double sum_inv = 0.0;
  std::vector<double> u(d);
  const EdfEstimate edf = hajek_edf(sample, table, dup);
  const double fhat = edf.value(x);
  for (std::size_t a = 0; a < d; ++a) {
    const double pa = pi_of(table, units[a]);
    sum_inv += 1.0 / pa;
    u[a] = ((units[a].value <= x ? 1.0 : 0.0) - fhat) / pa;
  }
  double total = 0.0;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      if (a == b) continue;
      const double pa = table.pi(units[a].weight_rank - 1);
      const double pb = table.pi(units[b].weight_rank - 1);
      const double pab = table.pi_pair(units[a].weight_rank - 1, units[b].weight_rank - 1);
      if (!(pab > 0.0))
        throw std::domain_error("sampled pair has zero joint inclusion probability");
      const double diff = u[a] - u[b];
      total += (pab - pa * pb) / pab * diff * diff;
    }
  return -0.5 / (sum_inv * sum_inv) * total;
}

Interval pointwise_ci(double fhat, double vhat, double alpha) {
  if (vhat < 0.0)
    throw std::domain_error("pointwise_ci: negative variance estimate");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("pointwise_ci: alpha in (0,1)");
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double half = z * std::sqrt(vhat);
  Interval ci;
  ci.lo = fhat - half;
  ci.hi = fhat + half;
  if (ci.lo < 0.0 || ci.hi > 1.0) ci.truncated = true;
  ci.lo = std::max(0.0, ci.lo);
  ci.hi = std::min(1.0, ci.hi);
  return ci;
}

MedianCi median_ci(const RankedSetSample& sample, const InclusionTable& table,
                   double alpha, QuantileRule rule) {
  const EdfEstimate edf = hajek_edf(sample, table);
  MedianCi out;
  out.median = edf.quantile(0.5, QuantileRule::Step);
  out.vhat = syg_variance_estimate(sample, table, out.median);
  if (out.vhat < 0.0)
    throw std::domain_error("median_ci: negative variance estimate at the median");
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double half = z * std::sqrt(out.vhat);
  out.c1 = 0.5 - half;
  out.c2 = 0.5 + half;
  if (out.c1 <= 0.0)
    throw std::domain_error("median_ci: lower probability bound c1 <= 0; the normal "
                            "approximation leaves the EDF range");
  if (out.c2 >= 1.0)
    throw std::domain_error("median_ci: upper probability bound c2 >= 1; the normal "
                            "approximation leaves the EDF range");
  out.lo = edf.quantile(out.c1, rule);
  out.hi = edf.quantile(out.c2, rule);
  return out;
}

std::vector<int> assign_expected_ranks(const std::vector<double>& values, int N) {
  const int n = static_cast<int>(values.size());
  if (n < 1) throw std::invalid_argument("assign_expected_ranks: empty sample");
  if (n > N) throw std::invalid_argument("assign_expected_ranks: more values than units");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)];
  });
  std::vector<int> ranks(static_cast<std::size_t>(n), 0);
  int prev = 0;
  for (int j = 1; j <= n; ++j) {
    int r = static_cast<int>(std::llround(static_cast<double>(j) * (N + 1) / (n + 1)));
    r = std::clamp(r, prev + 1, N - (n - j));  // keep ranks strictly increasing
    ranks[static_cast<std::size_t>(order[static_cast<std::size_t>(j - 1)])] = r;
    prev = r;
  }
  return ranks;
}

}  // namespace rss
