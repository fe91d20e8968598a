#include "rss/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rss/combinatorics.hpp"
#include "rss/enumeration.hpp"
#include "rss/errors.hpp"

namespace rss {

namespace {

// Joint law of two order statistics of one uniformly drawn k-subset:
// P(rank r is unit i, rank s is unit ip) for r < s, i < ip.
double within_set_joint(int i, int ip, int r, int s, int k, int N, const LogFact& lf) {
  const double l = lf.lchoose(i - 1, r - 1) + lf.lchoose(ip - i - 1, s - r - 1) +
                   lf.lchoose(N - ip, k - s) - lf.lchoose(N, k);
  return std::isinf(l) ? 0.0 : std::exp(l);
}

// Covariance matrix of the indicator pair (rank r, rank s) within one
// ranked set, plus the per-rank indicator means.
void within_set_covariances(const std::vector<double>& psi, int k, int N,
                            std::vector<double>& mean_r,
                            std::vector<std::vector<double>>& cov) {
  const LogFact lf(N);
  mean_r.assign(static_cast<std::size_t>(k), 0.0);
  for (int r = 1; r <= k; ++r) {
    double p = 0.0;
    for (int i = 1; i <= N; ++i)
      if (psi[static_cast<std::size_t>(i - 1)] > 0.5)
        p += order_statistic_prob(i, r, k, N);
    mean_r[static_cast<std::size_t>(r - 1)] = p;
  }
  cov.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (int r = 1; r <= k; ++r) {
    cov[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(r - 1)] =
        mean_r[static_cast<std::size_t>(r - 1)] * (1.0 - mean_r[static_cast<std::size_t>(r - 1)]);
    for (int s = r + 1; s <= k; ++s) {
      double joint = 0.0;
      for (int i = 1; i <= N; ++i) {
        if (psi[static_cast<std::size_t>(i - 1)] < 0.5) continue;
        for (int ip = i + 1; ip <= N; ++ip) {
          if (psi[static_cast<std::size_t>(ip - 1)] < 0.5) continue;
          joint += within_set_joint(i, ip, r, s, k, N, lf);
        }
      }
      const double c = joint - mean_r[static_cast<std::size_t>(r - 1)] *
                                   mean_r[static_cast<std::size_t>(s - 1)];
      cov[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(s - 1)] = c;
      cov[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(r - 1)] = c;
    }
  }
}

InclusionTable design_table(const DesignSpec& spec, int N, std::uint64_t state_budget) {
  switch (spec.design) {
    case Design::Srs: return srs_inclusion(N, spec.sample_size());
    case Design::Level0: return level0_inclusion(spec, N);
    case Design::Level2: return level2_inclusion(spec, N);
    case Design::Level1: return level1_inclusion(spec, N, state_budget);
  }
  throw std::logic_error("design_table: unreachable");
}

}  // namespace

DecompositionReport variance_decomposition_report(const Population& pop,
                                                  const DesignSpec& spec, double x,
                                                  std::uint64_t outcome_budget,
                                                  std::uint64_t state_budget) {
  spec.validate();
  const int N = pop.size();
  const int k = spec.set_size;
  const int m = spec.cycles;
  const int n = spec.sample_size();

  DecompositionReport rep;
  rep.spec = spec;
  rep.population_size = N;
  rep.x = x;
  rep.f_pop = pop.edf(x);

  std::vector<double> psi(static_cast<std::size_t>(N), 0.0);
  for (int u = 0; u < N; ++u) psi[static_cast<std::size_t>(u)] = pop.x(u) <= x ? 1.0 : 0.0;

  // Within-set covariances and the SRS(n=k) partition identity.
  std::vector<double> mean_r;
  within_set_covariances(psi, k, N, mean_r, rep.within_cov);
  {
    double sum_sigma = 0.0, sum_cross = 0.0;
    for (int r = 0; r < k; ++r) {
      sum_sigma += rep.within_cov[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
      for (int s = 0; s < k; ++s)
        if (s != r)
          sum_cross += rep.within_cov[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)];
    }
    const double partitioned = (sum_sigma + sum_cross) / (static_cast<double>(k) * k);
    rep.partition_identity_residual =
        std::fabs(partitioned - srs_variance_closed_form(N, k, rep.f_pop));
    rep.min_within_cov = rep.within_cov[0][0];
    for (int r = 0; r < k; ++r)
      for (int s = 0; s < k; ++s)
        rep.min_within_cov =
            std::min(rep.min_within_cov,
                     rep.within_cov[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)]);
  }

  // Weighted-EDF variance under this design and under SRS at matched n.
  const InclusionTable table = design_table(spec, N, state_budget);
  rep.weighted_variance_design = true_variance(pop, table, x);
  rep.weighted_variance_srs =
      true_variance(pop, srs_inclusion(N, n), x);

  if (spec.design == Design::Srs) {
    // No set structure: every cross-set term vanishes and the partition
    // identity above is the whole statement.
    rep.sigma_r = {rep.f_pop * (1.0 - rep.f_pop)};
    rep.cross_cov.assign(1, std::vector<double>(1, 0.0));
    rep.enumerated_variance = rep.weighted_variance_srs;
    rep.decomposed_variance = srs_variance_closed_form(N, n, rep.f_pop);
    rep.identity_residual = std::fabs(rep.enumerated_variance - rep.decomposed_variance);
    rep.max_cross_set_cov = 0.0;
    rep.mean_inverse_pi_sum = N;
    return rep;
  }

  // Exact per-set means, cross-set products and the unweighted-mean
  // variance from one exhaustive walk of the design's outcomes.
  std::vector<double> p_h(static_cast<std::size_t>(n), 0.0);
  std::vector<double> q_hh(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  rep.rank_position_prob.assign(static_cast<std::size_t>(k),
                                std::vector<double>(static_cast<std::size_t>(N), 0.0));
  double e1 = 0.0, e2 = 0.0, inv_pi_mean = 0.0;
  enumerate_outcomes(
      N, spec,
      [&](double prob, const std::vector<SetOutcome>& sets) {
        double meanv = 0.0;
        for (int h = 0; h < n; ++h) {
          const double v = psi[static_cast<std::size_t>(sets[static_cast<std::size_t>(h)].measured)];
          meanv += v;
          if (v > 0.5) p_h[static_cast<std::size_t>(h)] += prob;
          const int r = spec.rank_pattern[static_cast<std::size_t>(h)];
          rep.rank_position_prob[static_cast<std::size_t>(r - 1)]
                                [static_cast<std::size_t>(sets[static_cast<std::size_t>(h)].measured)] +=
              prob / m;
          for (int hp = 0; hp < n; ++hp) {
            if (hp == h) continue;
            const double vp =
                psi[static_cast<std::size_t>(sets[static_cast<std::size_t>(hp)].measured)];
            if (v > 0.5 && vp > 0.5)
              q_hh[static_cast<std::size_t>(h) * static_cast<std::size_t>(n) +
                   static_cast<std::size_t>(hp)] += prob;
          }
        }
        meanv /= n;
        e1 += prob * meanv;
        e2 += prob * meanv * meanv;
        double inv = 0.0;
        std::vector<int> seen;
        for (const auto& s : sets) {
          if (std::find(seen.begin(), seen.end(), s.measured) != seen.end()) continue;
          seen.push_back(s.measured);
          inv += 1.0 / table.pi(s.measured);
        }
        inv_pi_mean += prob * inv;
      },
      outcome_budget);
  rep.enumerated_variance = e2 - e1 * e1;
  rep.mean_inverse_pi_sum = inv_pi_mean;

  // Group by rank pairs.  For exchangeable designs every same-rank-pair
  // covariance coincides; for level-1 the grouped average is what enters.
  rep.sigma_r.assign(static_cast<std::size_t>(k), 0.0);
  std::vector<int> rank_count(static_cast<std::size_t>(k) + 1, 0);
  for (int h = 0; h < n; ++h) {
    const int r = spec.rank_pattern[static_cast<std::size_t>(h)];
    rep.sigma_r[static_cast<std::size_t>(r - 1)] +=
        p_h[static_cast<std::size_t>(h)] * (1.0 - p_h[static_cast<std::size_t>(h)]);
    ++rank_count[static_cast<std::size_t>(r)];
  }
  for (int r = 0; r < k; ++r)
    rep.sigma_r[static_cast<std::size_t>(r)] /= rank_count[static_cast<std::size_t>(r + 1)];

  rep.cross_cov.assign(static_cast<std::size_t>(k),
                       std::vector<double>(static_cast<std::size_t>(k), 0.0));
  std::vector<std::vector<int>> pair_count(static_cast<std::size_t>(k),
                                           std::vector<int>(static_cast<std::size_t>(k), 0));
  for (int h = 0; h < n; ++h)
    for (int hp = 0; hp < n; ++hp) {
      if (hp == h) continue;
      const int r = spec.rank_pattern[static_cast<std::size_t>(h)] - 1;
      const int s = spec.rank_pattern[static_cast<std::size_t>(hp)] - 1;
      const double cov = q_hh[static_cast<std::size_t>(h) * static_cast<std::size_t>(n) +
                              static_cast<std::size_t>(hp)] -
                         p_h[static_cast<std::size_t>(h)] * p_h[static_cast<std::size_t>(hp)];
      rep.cross_cov[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] += cov;
      ++pair_count[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)];
    }
  rep.max_cross_set_cov = 0.0;
  for (int r = 0; r < k; ++r)
    for (int s = 0; s < k; ++s) {
      if (pair_count[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] > 0)
        rep.cross_cov[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] /=
            pair_count[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)];
      rep.max_cross_set_cov =
          std::max(rep.max_cross_set_cov,
                   rep.cross_cov[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)]);
    }

  double rhs = 0.0;
  for (int r = 0; r < k; ++r) rhs += m * rep.sigma_r[static_cast<std::size_t>(r)];
  for (int r = 0; r < k; ++r)
    for (int s = 0; s < k; ++s)
      rhs += static_cast<double>(m) * m *
             rep.cross_cov[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)];
  for (int r = 0; r < k; ++r)
    rhs -= m * rep.cross_cov[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
  rep.decomposed_variance = rhs / (static_cast<double>(n) * n);
  rep.identity_residual = std::fabs(rep.enumerated_variance - rep.decomposed_variance);

  // Level-2 cross-set covariances also come out of the two-set closed form;
  // compare the two routes.
  if (spec.design == Design::Level2) {
    const LogFact lf(N);
    double worst = 0.0;
    for (int r = 1; r <= k; ++r)
      for (int s = 1; s <= k; ++s) {
        if (pair_count[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(s - 1)] == 0)
          continue;  // no set pair carries this rank pair (e.g. r == s at m=1)
        double joint = 0.0;
        for (int i = 1; i <= N; ++i) {
          if (psi[static_cast<std::size_t>(i - 1)] < 0.5) continue;
          for (int ip = 1; ip <= N; ++ip) {
            if (ip == i || psi[static_cast<std::size_t>(ip - 1)] < 0.5) continue;
            joint += (i < ip) ? detail::level2_pair_term(i, ip, r, s, k, N, lf)
                              : detail::level2_pair_term(ip, i, s, r, k, N, lf);
          }
        }
        double p_r = 0.0, p_s = 0.0;
        for (int i = 1; i <= N; ++i) {
          if (psi[static_cast<std::size_t>(i - 1)] < 0.5) continue;
          p_r += order_statistic_prob(i, r, k, N);
          p_s += order_statistic_prob(i, s, k, N);
        }
        const double closed = joint - p_r * p_s;
        worst = std::max(worst,
                         std::fabs(closed - rep.cross_cov[static_cast<std::size_t>(r - 1)]
                                                         [static_cast<std::size_t>(s - 1)]));
      }
    rep.closed_form_cross_residual = worst;
  }
  return rep;
}

bool DecompositionReport::pass(double tol) const {
  if (identity_residual > tol) return false;
  if (partition_identity_residual > tol) return false;
  if (max_cross_set_cov > tol) return false;
  if (min_within_cov < -tol) return false;
  if (weighted_variance_design > weighted_variance_srs + tol) return false;
  if (closed_form_cross_residual > tol && closed_form_cross_residual >= 0.0) return false;
  return true;
}

std::string DecompositionReport::summary() const {
  std::ostringstream os;
  os << "design=" << design_name(spec.design) << " N=" << population_size << " k="
     << spec.set_size << " m=" << spec.cycles << " x=" << x << " F=" << f_pop << "\n"
     << "  variance (enumerated)   " << enumerated_variance << "\n"
     << "  variance (decomposed)   " << decomposed_variance << "\n"
     << "  identity residual       " << identity_residual << "\n"
     << "  partition residual      " << partition_identity_residual << "\n"
     << "  max cross-set cov       " << max_cross_set_cov << " (expect <= 0)\n"
     << "  min within-set cov      " << min_within_cov << " (expect >= 0)\n"
     << "  weighted var design/srs " << weighted_variance_design << " / "
     << weighted_variance_srs << "\n"
     << "  E[sum 1/pi]             " << mean_inverse_pi_sum << " (N=" << population_size
     << ")\n";
  if (closed_form_cross_residual >= 0.0)
    os << "  closed-form C residual  " << closed_form_cross_residual << "\n";
  return os.str();
}

}  // namespace rss
