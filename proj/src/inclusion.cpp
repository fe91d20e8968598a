#include "rss/inclusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rss/combinatorics.hpp"
#include "rss/errors.hpp"
#include "rss/rng.hpp"

namespace rss {

std::string method_name(TableMethod m) {
  switch (m) {
    case TableMethod::ClosedForm: return "closed";
    case TableMethod::ExactEnumeration: return "exact";
    case TableMethod::MonteCarlo: return "mc";
  }
  return "?";
}

TableMethod method_from_name(const std::string& name) {
  if (name == "closed") return TableMethod::ClosedForm;
  if (name == "exact") return TableMethod::ExactEnumeration;
  if (name == "mc") return TableMethod::MonteCarlo;
  throw std::invalid_argument("unknown method '" + name + "' (expected closed|exact|mc)");
}

double InclusionTable::sum_first() const {
  return std::accumulate(first.begin(), first.end(), 0.0);
}

void InclusionTable::check_basic_invariants(double tol) const {
  const int N = population_size;
  for (int i = 0; i < N; ++i) {
    if (!(pi(i) > 0.0))
      throw verification_error("inclusion probability " + std::to_string(i + 1) +
                               " is not positive");
    if (pi(i) > 1.0 + tol)
      throw verification_error("inclusion probability " + std::to_string(i + 1) +
                               " exceeds one");
  }
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      const double a = pi_pair(i, j), b = pi_pair(j, i);
      if (std::fabs(a - b) > tol) throw verification_error("second-order matrix asymmetric");
      if (a > std::min(pi(i), pi(j)) + tol)
        throw verification_error("second-order entry exceeds min of first-order pair");
      if (a < -tol) throw verification_error("negative second-order entry");
    }
}

double order_statistic_prob(int i, int r, int k, int N) {
  if (N < 1 || k < 1 || k > N || r < 1 || r > k || i < 1 || i > N)
    throw std::domain_error("order_statistic_prob: need 1 <= r <= k <= N and 1 <= i <= N");
  if (r - 1 > i - 1 || k - r > N - i) return 0.0;
  const LogFact lf(N);
  return std::exp(lf.lchoose(i - 1, r - 1) + lf.lchoose(N - i, k - r) - lf.lchoose(N, k));
}

namespace {

InclusionTable make_table(const DesignSpec& spec, int N, TableMethod method) {
  InclusionTable t;
  t.population_size = N;
  t.spec = spec;
  t.method = method;
  t.first.assign(static_cast<std::size_t>(N), 0.0);
  t.second.assign(static_cast<std::size_t>(N) * static_cast<std::size_t>(N), 0.0);
  return t;
}

void require_feasible(const DesignSpec& spec, int N) {
  spec.validate();
  if (!is_feasible(spec, N))
    throw infeasible_design_error("design " + design_name(spec.design) +
                                  " infeasible for N=" + std::to_string(N) +
                                  " (k=" + std::to_string(spec.set_size) +
                                  ", m=" + std::to_string(spec.cycles) + ")");
}

// set-rank probabilities I(i; r, k, N) for all i and r, as a flat table
// rank-major: probs[(r-1)*N + (i-1)].
std::vector<double> rank_prob_table(int k, int N, const LogFact& lf) {
  std::vector<double> probs(static_cast<std::size_t>(k) * static_cast<std::size_t>(N), 0.0);
  const double denom = lf.lchoose(N, k);
  for (int r = 1; r <= k; ++r)
    for (int i = 1; i <= N; ++i) {
      const double l = lf.lchoose(i - 1, r - 1) + lf.lchoose(N - i, k - r) - denom;
      probs[static_cast<std::size_t>(r - 1) * static_cast<std::size_t>(N) +
            static_cast<std::size_t>(i - 1)] = std::isinf(l) ? 0.0 : std::exp(l);
    }
  return probs;
}

}  // namespace

InclusionTable srs_inclusion(int N, int n) {
  if (n < 1 || n > N) throw infeasible_design_error("srs needs 1 <= n <= N");
  InclusionTable t = make_table(DesignSpec::srs(n), N, TableMethod::ClosedForm);
  const double pi1 = static_cast<double>(n) / N;
  const double pi2 = (N > 1) ? static_cast<double>(n) * (n - 1) / (static_cast<double>(N) * (N - 1))
                             : 1.0;
  std::fill(t.first.begin(), t.first.end(), pi1);
  std::fill(t.second.begin(), t.second.end(), pi2);
  for (int i = 0; i < N; ++i) t.pi_pair_ref(i, i) = pi1;
  return t;
}

InclusionTable level0_inclusion(const DesignSpec& spec, int N, Exec exec) {
  require_feasible(spec, N);
  if (spec.design != Design::Level0)
    throw std::invalid_argument("level0_inclusion called with a non-level-0 spec");
  const int k = spec.set_size;
  const LogFact lf(N);
  const std::vector<double> I = rank_prob_table(k, N, lf);
  auto prob = [&](int i, int r) {
    return I[static_cast<std::size_t>(r - 1) * static_cast<std::size_t>(N) +
             static_cast<std::size_t>(i - 1)];
  };

  InclusionTable t = make_table(spec, N, TableMethod::ClosedForm);
  for (int i = 1; i <= N; ++i) {
    double never = 1.0;
    for (int r : spec.rank_pattern) never *= 1.0 - prob(i, r);
    t.first[static_cast<std::size_t>(i - 1)] = 1.0 - never;
  }
  for_index(N, exec, [&](std::int64_t row) {
    const int i = static_cast<int>(row) + 1;
    for (int j = i + 1; j <= N; ++j) {
      double miss_i = 1.0, miss_j = 1.0, miss_both = 1.0;
      for (int r : spec.rank_pattern) {
        const double a = prob(i, r), b = prob(j, r);
        miss_i *= 1.0 - a;
        miss_j *= 1.0 - b;
        miss_both *= 1.0 - a - b;  // measurement events are disjoint within a set
      }
      const double pij = 1.0 - miss_i - miss_j + miss_both;
      t.pi_pair_ref(i - 1, j - 1) = pij;
      t.pi_pair_ref(j - 1, i - 1) = pij;
    }
  });
  for (int i = 0; i < N; ++i) t.pi_pair_ref(i, i) = t.pi(i);
  return t;
}

namespace detail {

// P(unit i measured at rank r in one set AND unit ip measured at rank s in a
// different set) under the remove-whole-set design, for i < ip.  lambda
// counts the first set's unmeasured units falling strictly between i and ip.
double level2_pair_term(int i, int ip, int r, int s, int k, int N, const LogFact& lf) {
  const double ldenom = lf.lchoose(N, k) + lf.lchoose(N - k, k);
  const int lam_hi = std::min(ip - i - 1, k - r);
  double total = 0.0;
  for (int lam = 0; lam <= lam_hi; ++lam) {
    const double l = lf.lchoose(i - 1, r - 1) + lf.lchoose(ip - i - 1, lam) +
                     lf.lchoose(N - ip, k - lam - r) +
                     lf.lchoose(ip - 1 - r - lam, s - 1) +
                     lf.lchoose(N - ip - k + lam + r, k - s) - ldenom;
    if (!std::isinf(l)) total += std::exp(l);
  }
  return total;
}

}  // namespace detail

InclusionTable level2_inclusion(const DesignSpec& spec, int N, Exec exec) {
  require_feasible(spec, N);
  if (spec.design != Design::Level2)
    throw std::invalid_argument("level2_inclusion called with a non-level-2 spec");
  const int k = spec.set_size;
  const LogFact lf(N);
  const std::vector<double> I = rank_prob_table(k, N, lf);

  InclusionTable t = make_table(spec, N, TableMethod::ClosedForm);
  for (int i = 1; i <= N; ++i) {
    double p = 0.0;
    for (int r : spec.rank_pattern)
      p += I[static_cast<std::size_t>(r - 1) * static_cast<std::size_t>(N) +
             static_cast<std::size_t>(i - 1)];
    t.first[static_cast<std::size_t>(i - 1)] = p;  // = n/N for balanced patterns
  }

  // Ordered set pairs share one joint law by exchangeability of the draw
  // sequence, so the sum over h != h' collapses to rank-pair multiplicities.
  std::vector<int> rank_count(static_cast<std::size_t>(k) + 1, 0);
  for (int r : spec.rank_pattern) ++rank_count[static_cast<std::size_t>(r)];

  for_index(N, exec, [&](std::int64_t row) {
    const int i = static_cast<int>(row) + 1;
    for (int ip = i + 1; ip <= N; ++ip) {
      double pij = 0.0;
      for (int r = 1; r <= k; ++r) {
        if (!rank_count[static_cast<std::size_t>(r)]) continue;
        for (int s = 1; s <= k; ++s) {
          if (!rank_count[static_cast<std::size_t>(s)]) continue;
          long pairs = static_cast<long>(rank_count[static_cast<std::size_t>(r)]) *
                       rank_count[static_cast<std::size_t>(s)];
          if (r == s) pairs -= rank_count[static_cast<std::size_t>(r)];  // h == h' excluded
          if (pairs <= 0) continue;
          pij += static_cast<double>(pairs) *
                 detail::level2_pair_term(i, ip, r, s, k, N, lf);
        }
      }
      t.pi_pair_ref(i - 1, ip - 1) = pij;
      t.pi_pair_ref(ip - 1, i - 1) = pij;
    }
  });
  for (int i = 0; i < N; ++i) t.pi_pair_ref(i, i) = t.pi(i);
  return t;
}

namespace {

// Prefix sums over measured-position probabilities, one array per set index:
// pos_prefix[h][j] = P(measured unit of set h+1 sits at pool position <= j).
std::vector<std::vector<double>> level1_position_prefixes(const DesignSpec& spec, int N,
                                                          const LogFact& lf) {
  const int n = spec.sample_size();
  const int k = spec.set_size;
  std::vector<std::vector<double>> prefix(static_cast<std::size_t>(n));
  for (int h = 0; h < n; ++h) {
    const int pool = N - h;
    const int r = spec.rank_pattern[static_cast<std::size_t>(h)];
    std::vector<double>& row = prefix[static_cast<std::size_t>(h)];
    row.assign(static_cast<std::size_t>(pool) + 1, 0.0);
    const double denom = lf.lchoose(pool, k);
    for (int j = 1; j <= pool; ++j) {
      const double l = lf.lchoose(j - 1, r - 1) + lf.lchoose(pool - j, k - r) - denom;
      row[static_cast<std::size_t>(j)] =
          row[static_cast<std::size_t>(j - 1)] + (std::isinf(l) ? 0.0 : std::exp(l));
    }
  }
  return prefix;
}

}  // namespace

InclusionTable level1_inclusion(const DesignSpec& spec, int N, std::uint64_t state_budget,
                                Exec exec) {
  require_feasible(spec, N);
  if (spec.design != Design::Level1)
    throw std::invalid_argument("level1_inclusion called with a non-level-1 spec");
  const int n = spec.sample_size();

  // Pair DP state space: (#removed below i) x (#removed between i,ip) x 3
  // per set.  Estimate up front so oversized requests fail fast.
  std::uint64_t states = 0;
  for (int i = 1; i <= N; ++i)
    for (int ip = i + 1; ip <= N; ++ip)
      states += 3ull * static_cast<std::uint64_t>(n) *
                (std::min(n, i - 1) + 1) * (std::min(n, ip - i - 1) + 1);
  if (states > state_budget)
    throw budget_exceeded_error(
        "level-1 exact recursion needs ~" + std::to_string(states) +
        " DP states, over the budget of " + std::to_string(state_budget) +
        "; use Monte Carlo estimation or raise the budget");

  const LogFact lf(N);
  const auto prefix = level1_position_prefixes(spec, N, lf);
  auto measured_at = [&](int h, int pos) {
    const auto& row = prefix[static_cast<std::size_t>(h)];
    return row[static_cast<std::size_t>(pos)] - row[static_cast<std::size_t>(pos - 1)];
  };

  InclusionTable t = make_table(spec, N, TableMethod::ExactEnumeration);

  // First order: track the count of removed units below i.
  for (int i = 1; i <= N; ++i) {
    const int amax = std::min(n, i - 1);
    std::vector<double> mass(static_cast<std::size_t>(amax) + 1, 0.0);
    std::vector<double> next(static_cast<std::size_t>(amax) + 1, 0.0);
    mass[0] = 1.0;
    double incl = 0.0;
    for (int h = 0; h < n; ++h) {
      std::fill(next.begin(), next.end(), 0.0);
      const auto& pre = prefix[static_cast<std::size_t>(h)];
      const int pool = N - h;
      for (int a = 0; a <= std::min(amax, h); ++a) {
        const double w = mass[static_cast<std::size_t>(a)];
        if (w == 0.0) continue;
        const int below = i - 1 - a;
        const int above = pool - below - 1;
        const double p_self = measured_at(h, below + 1);
        incl += w * p_self;
        const double p_below = pre[static_cast<std::size_t>(below)];
        const double p_above = std::max(0.0, 1.0 - p_below - p_self);
        if (below > 0 && a + 1 <= amax)
          next[static_cast<std::size_t>(a + 1)] += w * p_below;
        // structural guard: without units above i the leftover mass is
        // rounding dust and must not survive into later sets
        if (above > 0) next[static_cast<std::size_t>(a)] += w * p_above;
      }
      mass.swap(next);
    }
    t.first[static_cast<std::size_t>(i - 1)] = incl;
  }

  // Second order: joint DP per pair (i < ip); status 0 = both unmeasured,
  // 1 = i already measured, 2 = ip already measured.
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(N) * (N - 1) / 2);
  for (int i = 1; i <= N; ++i)
    for (int ip = i + 1; ip <= N; ++ip) pairs.emplace_back(i, ip);

  for_index(static_cast<std::int64_t>(pairs.size()), exec, [&](std::int64_t idx) {
    const int i = pairs[static_cast<std::size_t>(idx)].first;
    const int ip = pairs[static_cast<std::size_t>(idx)].second;
    const int amax = std::min(n, i - 1);
    const int bmax = std::min(n, ip - i - 1);
    const std::size_t stride = static_cast<std::size_t>(bmax) + 1;
    const std::size_t cells = (static_cast<std::size_t>(amax) + 1) * stride * 3;
    std::vector<double> mass(cells, 0.0), next(cells, 0.0);
    auto at = [&](std::vector<double>& v, int a, int b, int s) -> double& {
      return v[(static_cast<std::size_t>(a) * stride + static_cast<std::size_t>(b)) * 3 +
               static_cast<std::size_t>(s)];
    };
    at(mass, 0, 0, 0) = 1.0;
    double both = 0.0;
    for (int h = 0; h < n; ++h) {
      std::fill(next.begin(), next.end(), 0.0);
      const int pool = N - h;
      const auto& pre = prefix[static_cast<std::size_t>(h)];
      for (int a = 0; a <= std::min(amax, h); ++a)
        for (int b = 0; b <= std::min(bmax, h); ++b)
          for (int s = 0; s < 3; ++s) {
            const double w = at(mass, a, b, s);
            if (w == 0.0) continue;
            const int alive_i = (s == 1) ? 0 : 1;
            const int alive_ip = (s == 2) ? 0 : 1;
            const int below = i - 1 - a;
            const int between = ip - i - 1 - b;
            const int above = pool - below - between - alive_i - alive_ip;
            const double p_i = alive_i ? measured_at(h, below + 1) : 0.0;
            const double p_ip =
                alive_ip ? measured_at(h, below + alive_i + between + 1) : 0.0;
            const double p_below = pre[static_cast<std::size_t>(below)];
            const double p_between =
                pre[static_cast<std::size_t>(below + alive_i + between)] -
                pre[static_cast<std::size_t>(below + alive_i)];
            const double p_above =
                std::max(0.0, 1.0 - p_below - p_between - p_i - p_ip);
            if (s == 0) {
              if (p_i > 0.0) at(next, a, b, 1) += w * p_i;
              if (p_ip > 0.0) at(next, a, b, 2) += w * p_ip;
            } else if (s == 1) {
              both += w * p_ip;
            } else {
              both += w * p_i;
            }
            if (below > 0 && a + 1 <= amax) at(next, a + 1, b, s) += w * p_below;
            if (between > 0 && b + 1 <= bmax) at(next, a, b + 1, s) += w * p_between;
            if (above > 0) at(next, a, b, s) += w * p_above;
          }
      mass.swap(next);
    }
    t.pi_pair_ref(i - 1, ip - 1) = both;
    t.pi_pair_ref(ip - 1, i - 1) = both;
  });
  for (int i = 0; i < N; ++i) t.pi_pair_ref(i, i) = t.pi(i);
  return t;
}

InclusionTable mc_inclusion(int N, const DesignSpec& spec, std::uint64_t reps,
                            std::uint64_t seed, Exec exec) {
  require_feasible(spec, N);
  if (reps < 1) throw std::invalid_argument("mc_inclusion needs reps >= 1");
  std::vector<double> x(static_cast<std::size_t>(N));
  std::iota(x.begin(), x.end(), 1.0);
  const Population pop(std::move(x));

  const int threads = std::max(1, max_threads());
  std::vector<std::vector<std::uint64_t>> firsts(
      static_cast<std::size_t>(threads),
      std::vector<std::uint64_t>(static_cast<std::size_t>(N), 0));
  std::vector<std::vector<std::uint64_t>> seconds(
      static_cast<std::size_t>(threads),
      std::vector<std::uint64_t>(static_cast<std::size_t>(N) * static_cast<std::size_t>(N), 0));

  for_index(static_cast<std::int64_t>(reps), exec, [&](std::int64_t rep) {
#ifdef _OPENMP
    const int tid = omp_get_thread_num();
#else
    const int tid = 0;
#endif
    auto& cf = firsts[static_cast<std::size_t>(tid)];
    auto& cs = seconds[static_cast<std::size_t>(tid)];
    RandomStream rng = RandomStream::substream(seed, static_cast<std::uint64_t>(rep));
    const RankedSetSample sample =
        (spec.design == Design::Srs)
            ? draw_srs_wor(pop, spec.sample_size(), rng)
            : draw_rss(pop, spec, Ranking::Perfect, rng);
    std::vector<int> units;
    for (const auto& e : sample.entries)
      if (e.measured) units.push_back(e.unit);
    std::sort(units.begin(), units.end());
    units.erase(std::unique(units.begin(), units.end()), units.end());
    for (std::size_t a = 0; a < units.size(); ++a) {
      ++cf[static_cast<std::size_t>(units[a])];
      for (std::size_t b = 0; b < units.size(); ++b)
        ++cs[static_cast<std::size_t>(units[a]) * static_cast<std::size_t>(N) +
             static_cast<std::size_t>(units[b])];
    }
  });

  // Integer merge: counts are order-independent, so the result is identical
  // for any thread count.
  InclusionTable t = make_table(spec, N, TableMethod::MonteCarlo);
  t.mc_reps = reps;
  t.first_se.assign(static_cast<std::size_t>(N), 0.0);
  t.second_se.assign(static_cast<std::size_t>(N) * static_cast<std::size_t>(N), 0.0);
  const double R = static_cast<double>(reps);
  for (int i = 0; i < N; ++i) {
    std::uint64_t c = 0;
    for (int tdx = 0; tdx < threads; ++tdx) c += firsts[static_cast<std::size_t>(tdx)][static_cast<std::size_t>(i)];
    const double p = static_cast<double>(c) / R;
    t.first[static_cast<std::size_t>(i)] = p;
    t.first_se[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, p * (1.0 - p) / R));
  }
  for (std::size_t cell = 0; cell < t.second.size(); ++cell) {
    std::uint64_t c = 0;
    for (int tdx = 0; tdx < threads; ++tdx) c += seconds[static_cast<std::size_t>(tdx)][cell];
    const double p = static_cast<double>(c) / R;
    t.second[cell] = p;
    t.second_se[cell] = std::sqrt(std::max(0.0, p * (1.0 - p) / R));
  }
  return t;
}

InclusionTable compute_inclusion(const DesignSpec& spec, int N, TableMethod method,
                                 std::uint64_t reps, std::uint64_t seed, Exec exec) {
  switch (method) {
    case TableMethod::ClosedForm:
      switch (spec.design) {
        case Design::Srs: return srs_inclusion(N, spec.sample_size());
        case Design::Level0: return level0_inclusion(spec, N, exec);
        case Design::Level2: return level2_inclusion(spec, N, exec);
        case Design::Level1:
          // No closed form; the exact recursion is the reference method.
          return level1_inclusion(spec, N, 10'000'000, exec);
      }
      break;
    case TableMethod::ExactEnumeration:
      if (spec.design == Design::Level1) return level1_inclusion(spec, N, 10'000'000, exec);
      return enumerate_inclusion(N, spec);
    case TableMethod::MonteCarlo:
      return mc_inclusion(N, spec, reps, seed, exec);
  }
  throw std::logic_error("compute_inclusion: unreachable");
}

}  // namespace rss
