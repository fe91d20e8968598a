// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.  Each criterion pins its tolerances in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rss/decomposition.hpp"
#include "rss/enumeration.hpp"
#include "rss/errors.hpp"
#include "rss/estimators.hpp"
#include "rss/inclusion.hpp"
#include "rss/simulation.hpp"

using namespace rss;

namespace {

struct Gate {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
  void note(const std::string& what) {
    detail << (detail.str().empty() ? "" : "; ") << what;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

RankedSetSample sheep_sample(const DesignSpec& spec) {
  const std::vector<double> vals = oracles::sheep_weights();
  const std::vector<int> ranks = assign_expected_ranks(vals, 224);
  RankedSetSample sample;
  sample.spec = spec;
  for (std::size_t h = 0; h < vals.size(); ++h) {
    SampleEntry e;
    e.set_index = static_cast<int>(h) + 1;
    e.in_set_rank = spec.rank_pattern[h];
    e.unit = ranks[h] - 1;
    e.value = vals[h];
    e.measured = true;
    e.weight_rank = ranks[h];
    sample.entries.push_back(e);
  }
  return sample;
}

// ---------------------------------------------------------------- criteria

Gate criterion_sheep_edf() {
  Gate g;
  const DesignSpec spec = DesignSpec::balanced(Design::Level2, 3, 7);
  const InclusionTable table = level2_inclusion(spec, 224);
  const RankedSetSample sample = sheep_sample(spec);
  const EdfEstimate edf = hajek_edf(sample, table);

  g.expect(std::fabs(edf.value(27.90) - 0.5714) <= 1e-4,
           "F(27.90)=" + fmt(edf.value(27.90)) + " != 0.5714");
  const auto plateaus = oracles::sheep_edf_plateaus();
  g.expect(edf.support().size() == plateaus.size(), "plateau count mismatch");
  g.expect(edf.value(20.0) == 0.0, "EDF below the minimum must be 0");
  for (std::size_t j = 0; j < plateaus.size() && j < edf.support().size(); ++j) {
    g.expect(edf.support()[j] == plateaus[j].x, "support point mismatch");
    g.expect(std::fabs(edf.cumulative()[j] - plateaus[j].f) <= 1e-4,
             "plateau at " + fmt(plateaus[j].x));
  }
  g.expect(edf.quantile(0.5) == 27.9, "median " + fmt(edf.quantile(0.5)) + " != 27.9");
  return g;
}

Gate criterion_sheep_intervals() {
  Gate g;
  const DesignSpec spec = DesignSpec::balanced(Design::Level2, 3, 7);
  const InclusionTable table = level2_inclusion(spec, 224);
  const RankedSetSample sample = sheep_sample(spec);
  const EdfEstimate edf = hajek_edf(sample, table);

  const double vhat = syg_variance_estimate(sample, table, 27.9);
  g.expect(std::fabs(vhat - 0.0072) <= 0.001, "V=" + fmt(vhat) + " not within 0.0072+-0.001");

  const MedianCi step = median_ci(sample, table, 0.05, QuantileRule::Step);
  const double z = normal_quantile(0.975);
  g.expect(std::fabs(step.c1 - (0.5 - z * std::sqrt(vhat))) < 1e-12, "c1 propagation");
  g.expect(std::fabs(step.c2 - (0.5 + z * std::sqrt(vhat))) < 1e-12, "c2 propagation");
  g.expect(std::fabs(step.c1 - 0.3264) <= 0.012, "c1=" + fmt(step.c1));
  g.expect(std::fabs(step.c2 - 0.6736) <= 0.012, "c2=" + fmt(step.c2));

  const Interval ci = pointwise_ci(edf.value(27.90), vhat, 0.05);
  g.expect(std::fabs(ci.lo - 0.3978) <= 0.02, "ci low " + fmt(ci.lo));
  g.expect(std::fabs(ci.hi - 0.745) <= 0.02, "ci high " + fmt(ci.hi));

  const MedianCi interp = median_ci(sample, table, 0.05, QuantileRule::Interpolated);
  g.expect(std::fabs(interp.lo - 25.7112) <= 0.15, "median ci low " + fmt(interp.lo));
  g.expect(std::fabs(interp.hi - 30.7360) <= 0.15, "median ci high " + fmt(interp.hi));
  g.note("V=" + fmt(vhat) + " c=(" + fmt(step.c1) + "," + fmt(step.c2) + ") step bounds=(" +
         fmt(step.lo) + "," + fmt(step.hi) + ") interp=(" + fmt(interp.lo) + "," +
         fmt(interp.hi) + ")");
  return g;
}

Gate criterion_re_anchors() {
  Gate g;
  auto re_at_half = [&](int N, int m, int k, Design d) {
    SimulationConfig cfg;
    cfg.population_size = N;
    cfg.set_size = k;
    cfg.cycles = m;
    cfg.designs = {Design::Srs, d};
    cfg.p_grid = {0.5};
    return run_perfect_re(cfg).at(d, 0.5).re;
  };
  struct Anchor {
    int N, m, k;
    Design d;
    double target, tol;
  };
  const Anchor anchors[] = {
      {50, 1, 7, Design::Level2, 3.2, 0.3}, {50, 1, 7, Design::Level0, 2.2, 0.3},
      {50, 1, 2, Design::Level2, 1.4, 0.15}, {100, 4, 3, Design::Level2, 1.8, 0.2},
      {100, 4, 5, Design::Level2, 2.8, 0.3}, {100, 2, 3, Design::Level2, 1.6, 0.2},
  };
  for (const Anchor& a : anchors) {
    const double re = re_at_half(a.N, a.m, a.k, a.d);
    g.expect(std::fabs(re - a.target) <= a.tol,
             "N=" + std::to_string(a.N) + " m=" + std::to_string(a.m) + " k=" +
                 std::to_string(a.k) + " " + design_name(a.d) + ": RE=" + fmt(re) +
                 " vs " + fmt(a.target) + "+-" + fmt(a.tol));
    g.note(design_name(a.d) + "(N=" + std::to_string(a.N) + ",m=" + std::to_string(a.m) +
           ",k=" + std::to_string(a.k) + ")=" + fmt(re));
  }
  return g;
}

Gate criterion_distribution_invariance() {
  Gate g;
  for (const auto& [N, m, k] : {std::tuple{20, 1, 2}, std::tuple{20, 1, 3},
                                std::tuple{100, 2, 3}}) {
    const InvarianceReport rep =
        distribution_invariance_check(N, m, k, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
    g.expect(rep.max_spread <= 1e-10, "spread " + fmt(rep.max_spread) + " at N=" +
                                          std::to_string(N) + ",k=" + std::to_string(k));
  }
  return g;
}

Gate criterion_inclusion_gates() {
  Gate g;
  for (const auto& [N, k] : {std::pair{20, 2}, std::pair{20, 3}, std::pair{224, 3}}) {
    for (int r = 1; r <= k; ++r) {
      double total = 0.0;
      for (int i = 1; i <= N; ++i) total += order_statistic_prob(i, r, k, N);
      g.expect(std::fabs(total - 1.0) <= 1e-12, "rank-sum gate");
    }
    for (int i = 1; i <= N; ++i) {
      double total = 0.0;
      for (int r = 1; r <= k; ++r) total += order_statistic_prob(i, r, k, N);
      g.expect(std::fabs(total - static_cast<double>(k) / N) <= 1e-12, "unit-sum gate");
    }
  }
  // fixed-size designs: first-order probabilities sum to n
  g.expect(std::fabs(srs_inclusion(20, 6).sum_first() - 6.0) <= 1e-9, "srs sum");
  g.expect(std::fabs(level1_inclusion(DesignSpec::balanced(Design::Level1, 3, 2), 20)
                         .sum_first() - 6.0) <= 1e-9, "level-1 sum");
  g.expect(std::fabs(level2_inclusion(DesignSpec::balanced(Design::Level2, 3, 2), 20)
                         .sum_first() - 6.0) <= 1e-9, "level-2 sum");

  // closed forms vs exhaustive enumeration
  auto table_gap = [](const InclusionTable& a, const InclusionTable& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.first.size(); ++i)
      worst = std::max(worst, std::fabs(a.first[i] - b.first[i]));
    for (std::size_t i = 0; i < a.second.size(); ++i)
      worst = std::max(worst, std::fabs(a.second[i] - b.second[i]));
    return worst;
  };
  for (int N : {4, 5, 6}) {
    const DesignSpec l0 = DesignSpec::balanced(Design::Level0, 2, 1);
    const DesignSpec l2 = DesignSpec::balanced(Design::Level2, 2, 1);
    const double gap_l0 = table_gap(level0_inclusion(l0, N), enumerate_inclusion(N, l0));
    const double gap_l2 = table_gap(level2_inclusion(l2, N), enumerate_inclusion(N, l2));
    g.expect(gap_l0 <= 1e-12, "l0 enumeration gate at N=" + std::to_string(N) +
                                  " residual " + fmt(gap_l0));
    g.expect(gap_l2 <= 1e-12, "l2 enumeration gate at N=" + std::to_string(N) +
                                  " residual " + fmt(gap_l2));
  }

  // Monte Carlo gate at N=20
  for (int k : {2, 3}) {
    for (Design d : {Design::Level0, Design::Level2}) {
      const DesignSpec spec = DesignSpec::balanced(d, k, 1);
      const InclusionTable closed =
          d == Design::Level0 ? level0_inclusion(spec, 20) : level2_inclusion(spec, 20);
      const InclusionTable mc = mc_inclusion(20, spec, 100000, 4200 + k);
      double worst = 0.0;
      for (std::size_t i = 0; i < closed.first.size(); ++i) {
        const double se = std::sqrt(
            std::max(closed.first[i] * (1 - closed.first[i]), 1e-12) / 100000.0);
        worst = std::max(worst, std::fabs(closed.first[i] - mc.first[i]) / se);
      }
      for (std::size_t i = 0; i < closed.second.size(); ++i) {
        const double p = closed.second[i];
        if (p <= 1e-9 || p >= 1 - 1e-9) continue;
        worst = std::max(worst, std::fabs(p - mc.second[i]) /
                                    std::sqrt(p * (1 - p) / 100000.0));
      }
      g.expect(worst <= 4.0, design_name(d) + " k=" + std::to_string(k) +
                                 " MC gate |z|=" + fmt(worst));
    }
  }
  return g;
}

Gate criterion_unbiasedness() {
  Gate g;
  const int N = 20, reps = 10000;
  const Population pop = Population::grid(N, DistributionKind::StandardUniform);
  const DesignSpec specs[] = {
      DesignSpec::srs(6), DesignSpec::balanced(Design::Level0, 3, 2),
      DesignSpec::balanced(Design::Level1, 3, 2), DesignSpec::balanced(Design::Level2, 3, 2)};
  std::vector<double> p_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  for (const DesignSpec& spec : specs) {
    InclusionTable table;
    switch (spec.design) {
      case Design::Srs: table = srs_inclusion(N, 6); break;
      case Design::Level0: table = level0_inclusion(spec, N); break;
      case Design::Level1: table = level1_inclusion(spec, N); break;
      case Design::Level2: table = level2_inclusion(spec, N); break;
    }
    std::vector<std::vector<double>> fhat(p_grid.size());
    for (int rep = 0; rep < reps; ++rep) {
      RandomStream rng = RandomStream::substream(8675309, static_cast<std::uint64_t>(rep));
      const RankedSetSample sample = (spec.design == Design::Srs)
                                         ? draw_srs_wor(pop, 6, rng)
                                         : draw_rss(pop, spec, Ranking::Perfect, rng);
      const EdfEstimate edf = hajek_edf(sample, table);
      for (std::size_t gidx = 0; gidx < p_grid.size(); ++gidx)
        fhat[gidx].push_back(edf.value(pop.quantile_value(p_grid[gidx])));
    }
    for (std::size_t gidx = 0; gidx < p_grid.size(); ++gidx) {
      const oracles::Moments m = oracles::moments(fhat[gidx]);
      const double truth = pop.edf(pop.quantile_value(p_grid[gidx]));
      g.expect(std::fabs(m.mean - truth) < 3.0 * m.se_mean,
               design_name(spec.design) + " bias " + fmt(m.mean - truth) + " at p=" +
                   fmt(p_grid[gidx]));
    }
  }
  return g;
}

Gate criterion_variance_dominance() {
  Gate g;
  struct Config {
    int N, m, k;
  };
  const Config configs[] = {{20, 1, 2}, {20, 1, 3}, {20, 1, 4},
                            {100, 2, 3}, {100, 4, 3}, {100, 2, 5}, {100, 4, 5}};
  for (const Config& c : configs) {
    const Population pop = Population::grid(c.N, DistributionKind::StandardUniform);
    const int n = c.m * c.k;
    const InclusionTable srs = srs_inclusion(c.N, n);
    std::vector<std::pair<std::string, InclusionTable>> tables;
    tables.emplace_back("l0", level0_inclusion(DesignSpec::balanced(Design::Level0, c.k, c.m), c.N));
    tables.emplace_back("l1", level1_inclusion(DesignSpec::balanced(Design::Level1, c.k, c.m),
                                               c.N, 400'000'000));
    tables.emplace_back("l2", level2_inclusion(DesignSpec::balanced(Design::Level2, c.k, c.m), c.N));
    for (int d = 1; d <= 9; ++d) {
      const double x = pop.quantile_value(d / 10.0);
      const double vs = true_variance(pop, srs, x);
      for (const auto& [name, table] : tables) {
        const double vt = true_variance(pop, table, x);
        g.expect(vt <= vs + 1e-12, name + " N=" + std::to_string(c.N) + " k=" +
                                       std::to_string(c.k) + " m=" + std::to_string(c.m) +
                                       " p=" + fmt(d / 10.0) + ": " + fmt(vt) + " > " +
                                       fmt(vs));
      }
    }
  }
  // imperfect ranking: empirical MSE of the level-2 estimator at the median
  // stays below the exact SRS variance
  for (const Config& c : configs) {
    SimulationConfig cfg;
    cfg.population_size = c.N;
    cfg.set_size = c.k;
    cfg.cycles = c.m;
    cfg.designs = {Design::Srs, Design::Level2};
    cfg.rho = 0.75;
    cfg.reps = 10000;
    cfg.p_grid = {0.5};
    cfg.master_seed = 777;
    const REResult res = run_imperfect_re(cfg);
    const Population pop = Population::grid(c.N, DistributionKind::StandardUniform);
    const double vs = true_variance(pop, srs_inclusion(c.N, c.m * c.k),
                                    pop.quantile_value(0.5));
    const double mse = res.at(Design::Level2, 0.5).mse;
    g.expect(mse <= vs, "imperfect N=" + std::to_string(c.N) + " k=" + std::to_string(c.k) +
                            " m=" + std::to_string(c.m) + ": MSE " + fmt(mse) + " > " +
                            fmt(vs));
  }
  return g;
}

Gate criterion_decomposition() {
  Gate g;
  {
    const Population pop = Population::grid(6, DistributionKind::StandardUniform);
    const DecompositionReport rep = variance_decomposition_report(
        pop, DesignSpec::balanced(Design::Level2, 2, 1), pop.quantile_value(0.5));
    g.expect(rep.identity_residual < 1e-10, "level-2 residual " + fmt(rep.identity_residual));
  }
  {
    const Population pop = Population::grid(5, DistributionKind::StandardUniform);
    const DecompositionReport rep = variance_decomposition_report(
        pop, DesignSpec::balanced(Design::Level1, 2, 1), pop.quantile_value(0.5));
    g.expect(rep.identity_residual < 1e-10, "level-1 residual " + fmt(rep.identity_residual));
  }
  {
    const int N = 20, n = 5, reps = 10000;
    const Population pop = Population::grid(N, DistributionKind::StandardNormal);
    const InclusionTable table = srs_inclusion(N, n);
    const double x = pop.quantile_value(0.5);
    std::vector<double> est;
    est.reserve(reps);
    for (int rep = 0; rep < reps; ++rep) {
      RandomStream rng = RandomStream::substream(1001, static_cast<std::uint64_t>(rep));
      est.push_back(syg_variance_estimate(draw_srs_wor(pop, n, rng), table, x));
    }
    const oracles::Moments m = oracles::moments(est);
    const double truth = srs_variance_closed_form(N, n, pop.edf(x));
    g.expect(std::fabs(m.mean - truth) < 3.0 * m.se_mean,
             "variance-estimator mean " + fmt(m.mean) + " vs " + fmt(truth));
  }
  return g;
}

Gate criterion_imperfect_orderings() {
  Gate g;
  const DistributionKind kinds[] = {DistributionKind::StandardNormal,
                                    DistributionKind::StandardUniform,
                                    DistributionKind::StandardExponential,
                                    DistributionKind::Beta52};
  for (DistributionKind kind : kinds) {
    SimulationConfig cfg;
    cfg.population_size = 20;
    cfg.set_size = 4;
    cfg.cycles = 1;
    cfg.dist = kind;
    cfg.designs = {Design::Srs, Design::Level2};
    cfg.p_grid = {0.5};
    cfg.reps = 10000;
    cfg.master_seed = 271828;
    double res_re[3], res_se[3];
    const double rhos[] = {0.9, 0.75, 0.5};
    for (int idx = 0; idx < 3; ++idx) {
      cfg.rho = rhos[idx];
      const RERow row = run_imperfect_re(cfg).at(Design::Level2, 0.5);
      res_re[idx] = row.re;
      res_se[idx] = row.re_se;
    }
    for (int idx = 0; idx + 1 < 3; ++idx) {
      const double gap = res_re[idx] - res_re[idx + 1];
      const double combined = std::hypot(res_se[idx], res_se[idx + 1]);
      g.expect(gap > 2.0 * combined,
               distribution_name(kind) + " rho " + fmt(rhos[idx]) + "->" + fmt(rhos[idx + 1]) +
                   " gap " + fmt(gap) + " <= 2*" + fmt(combined));
    }
    g.note(distribution_name(kind) + " RE(0.9/0.75/0.5)=" + fmt(res_re[0]) + "/" +
           fmt(res_re[1]) + "/" + fmt(res_re[2]));
  }
  // the uniform RE curve peaks at the median
  {
    SimulationConfig cfg;
    cfg.population_size = 20;
    cfg.set_size = 4;
    cfg.cycles = 1;
    cfg.dist = DistributionKind::StandardUniform;
    cfg.designs = {Design::Srs, Design::Level2};
    cfg.rho = 0.9;
    cfg.reps = 20000;
    cfg.master_seed = 1614;
    const REResult res = run_imperfect_re(cfg);
    double best_p = 0.0, best_re = -1.0;
    for (double p : cfg.p_grid) {
      const double re = res.at(Design::Level2, p).re;
      if (re > best_re) {
        best_re = re;
        best_p = p;
      }
    }
    g.expect(std::fabs(best_p - 0.5) < 1e-9, "uniform RE peak at p=" + fmt(best_p));
  }
  return g;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    std::function<Gate()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "field-study EDF, plateaus and median", criterion_sheep_edf},
      {2, "field-study variance and confidence intervals", criterion_sheep_intervals},
      {3, "perfect-ranking relative-efficiency anchors", criterion_re_anchors},
      {4, "distribution invariance of perfect-ranking REs", criterion_distribution_invariance},
      {5, "inclusion-probability gates", criterion_inclusion_gates},
      {6, "unbiasedness at all deciles", criterion_unbiasedness},
      {7, "variance dominance over srs", criterion_variance_dominance},
      {8, "variance decomposition and estimator calibration", criterion_decomposition},
      {9, "imperfect-ranking orderings", criterion_imperfect_orderings},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Gate gate;
    try {
      gate = c.run();
    } catch (const std::exception& e) {
      gate.ok = false;
      gate.detail << "exception: " << e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s (%.1fs)%s%s\n", gate.ok ? "PASS" : "FAIL", c.id,
                c.name.c_str(), secs, gate.detail.str().empty() ? "" : " -- ",
                gate.detail.str().c_str());
    std::fflush(stdout);
    if (!gate.ok) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
