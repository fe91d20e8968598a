#pragma once

#include <string>
#include <vector>

#include "rss/population.hpp"
#include "rss/rng.hpp"

namespace rss {

// Sampling design identity.  The three ranked-set designs differ only in
// their replacement policy after each set is ranked and one unit measured:
//   Level0 returns all k set units to the pool,
//   Level1 removes only the measured unit,
//   Level2 removes the whole set.
enum class Design { Srs, Level0, Level1, Level2 };

Design design_from_name(const std::string& name);
std::string design_name(Design d);

enum class Ranking { Perfect, ByAuxiliary };

struct DesignSpec {
  Design design = Design::Srs;
  int set_size = 1;                // k
  int cycles = 1;                  // m
  std::vector<int> rank_pattern;   // length m*k, entries in 1..k

  // Balanced pattern: ranks 1..k in order within each cycle.
  static DesignSpec balanced(Design d, int set_size, int cycles);
  // SRS of size n, modeled as k=1, m=n (a singleton set is always rank 1).
  static DesignSpec srs(int sample_size);

  int sample_size() const { return set_size * cycles; }
  bool is_balanced() const;
  void validate() const;  // throws std::invalid_argument on a bad pattern
};

// Sampling feasibility on a population of size N:
//   SRS: n <= N          Level0: k <= N
//   Level1: (n-1)+k <= N Level2: m*k^2 <= N
bool is_feasible(const DesignSpec& spec, int population_size);

struct SampleEntry {
  int set_index;     // 1..n, in draw order
  int in_set_rank;   // judged rank of this unit within its set
  int unit;          // 0-based population index (id = unit + 1)
  double value;      // study value (NaN when unknown, e.g. field sessions)
  bool measured;
  int weight_rank;   // rank used to index inclusion tables (1..N)
};

// A drawn sample with full per-set provenance: unmeasured set members are
// recorded so replacement bookkeeping and the set-level invariants can be
// audited after the fact.
struct RankedSetSample {
  DesignSpec spec;
  Ranking ranking = Ranking::Perfect;
  std::vector<SampleEntry> entries;

  std::vector<SampleEntry> measured_entries() const;
  // Measured entries with duplicate population units collapsed (keep first).
  std::vector<SampleEntry> distinct_measured() const;
};

// n distinct units drawn uniformly without replacement; set_index records
// draw order and in_set_rank is fixed at 1.
RankedSetSample draw_srs_wor(const Population& pop, int n, RandomStream& rng);

// One ranked-set draw following the design's replacement policy.  Perfect
// ranking orders each set by the study variable (ties by smaller id);
// ByAuxiliary uses the population's judgment ranks and requires an
// auxiliary variable to be present.
RankedSetSample draw_rss(const Population& pop, const DesignSpec& spec, Ranking ranking,
                         RandomStream& rng);

}  // namespace rss
