#include "rss/designs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rss/errors.hpp"

namespace rss {

Design design_from_name(const std::string& name) {
  if (name == "srs") return Design::Srs;
  if (name == "l0") return Design::Level0;
  if (name == "l1") return Design::Level1;
  if (name == "l2") return Design::Level2;
  throw std::invalid_argument("unknown design '" + name + "' (expected srs|l0|l1|l2)");
}

std::string design_name(Design d) {
  switch (d) {
    case Design::Srs: return "srs";
    case Design::Level0: return "l0";
    case Design::Level1: return "l1";
    case Design::Level2: return "l2";
  }
  return "?";
}

DesignSpec DesignSpec::balanced(Design d, int set_size, int cycles) {
  DesignSpec spec;
  spec.design = d;
  spec.set_size = set_size;
  spec.cycles = cycles;
  spec.rank_pattern.reserve(static_cast<std::size_t>(set_size) * cycles);
  for (int j = 0; j < cycles; ++j)
    for (int r = 1; r <= set_size; ++r) spec.rank_pattern.push_back(r);
  spec.validate();
  return spec;
}

DesignSpec DesignSpec::srs(int sample_size) {
  return balanced(Design::Srs, 1, sample_size);
}

bool DesignSpec::is_balanced() const {
  std::vector<int> count(static_cast<std::size_t>(set_size) + 1, 0);
  for (int r : rank_pattern) ++count[static_cast<std::size_t>(r)];
  for (int r = 1; r <= set_size; ++r)
    if (count[static_cast<std::size_t>(r)] != cycles) return false;
  return true;
}

void DesignSpec::validate() const {
  if (set_size < 1 || cycles < 1)
    throw std::invalid_argument("design needs set size k >= 1 and cycles m >= 1");
  if (static_cast<int>(rank_pattern.size()) != sample_size())
    throw std::invalid_argument("rank pattern length must be m*k");
  for (int r : rank_pattern)
    if (r < 1 || r > set_size)
      throw std::invalid_argument("rank pattern entries must lie in 1..k");
}

bool is_feasible(const DesignSpec& spec, int population_size) {
  const int n = spec.sample_size();
  const int k = spec.set_size;
  switch (spec.design) {
    case Design::Srs: return n <= population_size;
    case Design::Level0: return k <= population_size;
    case Design::Level1: return (n - 1) + k <= population_size;
    case Design::Level2: return spec.cycles * k * k <= population_size;
  }
  return false;
}

std::vector<SampleEntry> RankedSetSample::measured_entries() const {
  std::vector<SampleEntry> out;
  for (const auto& e : entries)
    if (e.measured) out.push_back(e);
  return out;
}

std::vector<SampleEntry> RankedSetSample::distinct_measured() const {
  std::vector<SampleEntry> out;
  std::vector<int> seen;
  for (const auto& e : entries) {
    if (!e.measured) continue;
    if (std::find(seen.begin(), seen.end(), e.unit) != seen.end()) continue;
    seen.push_back(e.unit);
    out.push_back(e);
  }
  return out;
}

RankedSetSample draw_srs_wor(const Population& pop, int n, RandomStream& rng) {
  const int N = pop.size();
  if (n < 1) throw std::invalid_argument("sample size must be positive");
  if (n > N)
    throw infeasible_design_error("srs sample size exceeds population size");
  std::vector<int> pool(static_cast<std::size_t>(N));
  std::iota(pool.begin(), pool.end(), 0);
  RankedSetSample sample;
  sample.spec = DesignSpec::srs(n);
  sample.ranking = Ranking::Perfect;
  for (int j = 0; j < n; ++j) {
    const std::size_t pick = static_cast<std::size_t>(j) +
                             static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(N - j)));
    std::swap(pool[static_cast<std::size_t>(j)], pool[pick]);
    const int unit = pool[static_cast<std::size_t>(j)];
    sample.entries.push_back({j + 1, 1, unit, pop.x(unit), true, unit + 1});
  }
  return sample;
}

RankedSetSample draw_rss(const Population& pop, const DesignSpec& spec, Ranking ranking,
                         RandomStream& rng) {
  spec.validate();
  const int N = pop.size();
  if (spec.design == Design::Srs) return draw_srs_wor(pop, spec.sample_size(), rng);
  if (!is_feasible(spec, N))
    throw infeasible_design_error("design " + design_name(spec.design) + " with k=" +
                                  std::to_string(spec.set_size) + ", m=" +
                                  std::to_string(spec.cycles) + " infeasible for N=" +
                                  std::to_string(N));
  if (ranking == Ranking::ByAuxiliary && !pop.has_auxiliary())
    throw std::invalid_argument("auxiliary ranking requested but population has none");

  const int k = spec.set_size;
  const int n = spec.sample_size();
  std::vector<int> pool(static_cast<std::size_t>(N));
  std::iota(pool.begin(), pool.end(), 0);

  RankedSetSample sample;
  sample.spec = spec;
  sample.ranking = ranking;
  std::vector<int> set(static_cast<std::size_t>(k));
  for (int h = 1; h <= n; ++h) {
    const int pool_size = static_cast<int>(pool.size());
    for (int j = 0; j < k; ++j) {
      const std::size_t pick = static_cast<std::size_t>(j) +
          static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(pool_size - j)));
      std::swap(pool[static_cast<std::size_t>(j)], pool[pick]);
      set[static_cast<std::size_t>(j)] = pool[static_cast<std::size_t>(j)];
    }
    // Judged order within the set.  Units are labeled in study-value order,
    // so perfect ranking (ties by smaller id) is ranking by unit index.
    if (ranking == Ranking::Perfect) {
      std::sort(set.begin(), set.end());
    } else {
      std::sort(set.begin(), set.end(), [&](int a, int b) {
        return pop.judgment_rank(a) < pop.judgment_rank(b);
      });
    }
    const int r_h = spec.rank_pattern[static_cast<std::size_t>(h - 1)];
    const int measured_unit = set[static_cast<std::size_t>(r_h - 1)];
    for (int j = 0; j < k; ++j) {
      const int unit = set[static_cast<std::size_t>(j)];
      // Inclusion tables are indexed by position in the consistent ranking:
      // the unit id under perfect ranking, the judgment rank otherwise.
      const int wrank =
          (ranking == Ranking::Perfect) ? unit + 1 : pop.judgment_rank(unit);
      sample.entries.push_back(
          {h, j + 1, unit, pop.x(unit), unit == measured_unit, wrank});
    }

    switch (spec.design) {
      case Design::Level0:
        break;  // everything back in the pool
      case Design::Level1: {
        auto it = std::find(pool.begin(), pool.end(), measured_unit);
        std::swap(*it, pool.back());
        pool.pop_back();
        break;
      }
      case Design::Level2: {
        for (int j = 0; j < k; ++j) {
          auto it = std::find(pool.begin(), pool.end(), set[static_cast<std::size_t>(j)]);
          std::swap(*it, pool.back());
          pool.pop_back();
        }
        break;
      }
      case Design::Srs:
        break;  // unreachable
    }
  }
  return sample;
}

}  // namespace rss
