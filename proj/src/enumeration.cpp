#include "rss/enumeration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rss/combinatorics.hpp"
#include "rss/errors.hpp"
#include "rss/inclusion.hpp"

namespace rss {

namespace {

double expected_outcomes(int N, const DesignSpec& spec) {
  const LogFact lf(N);
  double log_total = 0.0;
  int pool = N;
  for (int h = 0; h < spec.sample_size(); ++h) {
    log_total += lf.lchoose(pool, spec.set_size);
    if (spec.design == Design::Level1) pool -= 1;
    if (spec.design == Design::Level2) pool -= spec.set_size;
  }
  return std::exp(log_total);
}

struct Walker {
  const DesignSpec& spec;
  const OutcomeVisitor& visit;
  LogFact lf;
  std::vector<SetOutcome> sets;

  Walker(const DesignSpec& s, const OutcomeVisitor& v, int N) : spec(s), visit(v), lf(N) {
    sets.resize(static_cast<std::size_t>(spec.sample_size()));
  }

  void run(std::vector<int>& pool, int h, double prob) {
    const int n = spec.sample_size();
    if (h == n) {
      visit(prob, sets);
      return;
    }
    const int k = spec.set_size;
    const int P = static_cast<int>(pool.size());
    const double w = prob / lf.choose(P, k);
    std::vector<int> combo(static_cast<std::size_t>(k));  // one scratch per set level
    choose(pool, combo, h, 0, 0, w);
  }

  // Enumerate k-subsets of the pool by ascending index; the pool is kept
  // sorted, so subset members come out in judged (ascending) order.
  void choose(std::vector<int>& pool, std::vector<int>& combo, int h, int start, int depth,
              double w) {
    const int k = spec.set_size;
    if (depth == k) {
      SetOutcome& out = sets[static_cast<std::size_t>(h)];
      out.members.resize(static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j)
        out.members[static_cast<std::size_t>(j)] = pool[static_cast<std::size_t>(combo[static_cast<std::size_t>(j)])];
      const int r = spec.rank_pattern[static_cast<std::size_t>(h)];
      out.measured = out.members[static_cast<std::size_t>(r - 1)];

      std::vector<int> next_pool;
      switch (spec.design) {
        case Design::Level0:
        case Design::Srs:
          next_pool = pool;
          break;
        case Design::Level1:
          next_pool.reserve(pool.size() - 1);
          for (int u : pool)
            if (u != out.measured) next_pool.push_back(u);
          break;
        case Design::Level2:
          next_pool.reserve(pool.size() - static_cast<std::size_t>(k));
          for (int u : pool)
            if (!std::binary_search(out.members.begin(), out.members.end(), u))
              next_pool.push_back(u);
          break;
      }
      run(next_pool, h + 1, w);
      return;
    }
    const int P = static_cast<int>(pool.size());
    for (int idx = start; idx <= P - (k - depth); ++idx) {
      combo[static_cast<std::size_t>(depth)] = idx;
      choose(pool, combo, h, idx + 1, depth + 1, w);
    }
  }
};

}  // namespace

void enumerate_outcomes(int N, const DesignSpec& spec, const OutcomeVisitor& visit,
                        std::uint64_t outcome_budget) {
  spec.validate();
  if (!is_feasible(spec, N))
    throw infeasible_design_error("enumeration requested for an infeasible design");
  const double expected = expected_outcomes(N, spec);
  if (expected > static_cast<double>(outcome_budget))
    throw budget_exceeded_error("enumeration would visit ~" + std::to_string(expected) +
                                " outcomes, over the budget of " +
                                std::to_string(outcome_budget));
  // SRS has no set structure; model it as n singleton "sets" (k=1, rank 1),
  // which draws the same uniform without-replacement sample.
  DesignSpec eff = spec;
  if (spec.design == Design::Srs) {
    eff = DesignSpec::balanced(Design::Level1, 1, spec.sample_size());
  }
  std::vector<int> pool(static_cast<std::size_t>(N));
  std::iota(pool.begin(), pool.end(), 0);
  Walker walker(eff, visit, N);
  walker.run(pool, 0, 1.0);
}

InclusionTable enumerate_inclusion(int N, const DesignSpec& spec,
                                   std::uint64_t outcome_budget) {
  InclusionTable t;
  t.population_size = N;
  t.spec = spec;
  t.method = TableMethod::ExactEnumeration;
  t.first.assign(static_cast<std::size_t>(N), 0.0);
  t.second.assign(static_cast<std::size_t>(N) * static_cast<std::size_t>(N), 0.0);
  std::vector<int> units;
  enumerate_outcomes(
      N, spec,
      [&](double prob, const std::vector<SetOutcome>& sets) {
        units.clear();
        for (const auto& s : sets) units.push_back(s.measured);
        std::sort(units.begin(), units.end());
        units.erase(std::unique(units.begin(), units.end()), units.end());
        for (std::size_t a = 0; a < units.size(); ++a) {
          t.first[static_cast<std::size_t>(units[a])] += prob;
          for (std::size_t b = 0; b < units.size(); ++b)
            t.second[static_cast<std::size_t>(units[a]) * static_cast<std::size_t>(N) +
                     static_cast<std::size_t>(units[b])] += prob;
        }
      },
      outcome_budget);
  for (int i = 0; i < N; ++i) t.pi_pair_ref(i, i) = t.pi(i);
  return t;
}

ExactMoments enumerate_statistic_moments(
    int N, const DesignSpec& spec,
    const std::function<double(const std::vector<SetOutcome>&)>& statistic,
    std::uint64_t outcome_budget) {
  double e1 = 0.0, e2 = 0.0, mass = 0.0;
  enumerate_outcomes(
      N, spec,
      [&](double prob, const std::vector<SetOutcome>& sets) {
        const double v = statistic(sets);
        e1 += prob * v;
        e2 += prob * v * v;
        mass += prob;
      },
      outcome_budget);
  // mass is 1 up to accumulated rounding; normalize to cancel the dust.
  e1 /= mass;
  e2 /= mass;
  return {e1, std::max(0.0, e2 - e1 * e1)};
}

}  // namespace rss
