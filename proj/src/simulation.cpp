#include "rss/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rss/errors.hpp"
#include "rss/io.hpp"

namespace rss {

DesignSpec SimulationConfig::spec_for(Design d) const {
  if (d == Design::Srs) return DesignSpec::srs(set_size * cycles);
  if (!rank_pattern.empty()) {
    DesignSpec spec;
    spec.design = d;
    spec.set_size = set_size;
    spec.cycles = cycles;
    spec.rank_pattern = rank_pattern;
    spec.validate();
    return spec;
  }
  return DesignSpec::balanced(d, set_size, cycles);
}

void SimulationConfig::validate_feasible() const {
  if (reps < 1) throw std::invalid_argument("simulation needs reps >= 1");
  if (rho < -1.0 || rho > 1.0) throw std::invalid_argument("rho must lie in [-1, 1]");
  if (designs.empty()) throw std::invalid_argument("simulation needs at least one design");
  for (Design d : designs) {
    const DesignSpec spec = spec_for(d);
    if (!is_feasible(spec, population_size))
      throw infeasible_design_error("design " + design_name(d) + " infeasible for N=" +
                                    std::to_string(population_size));
  }
}

const RERow& REResult::at(Design d, double p) const& {
  for (const RERow& r : rows)
    if (r.design == d && std::fabs(r.p - p) < 1e-9) return r;
  throw std::out_of_range("no RE row for that design/p");
}

RERow REResult::at(Design d, double p) const&& { return static_cast<const REResult&>(*this).at(d, p); }

namespace {

struct GridPoint {
  double p, x, f;
};

std::vector<GridPoint> make_grid(const Population& pop, const std::vector<double>& p_grid) {
  std::vector<GridPoint> grid;
  grid.reserve(p_grid.size());
  for (double p : p_grid) {
    const double x = pop.quantile_value(p);
    grid.push_back({p, x, pop.edf(x)});
  }
  return grid;
}

InclusionTable exact_or_mc_table(const DesignSpec& spec, int N, Exec exec,
                                 std::uint64_t mc_reps, std::uint64_t seed,
                                 std::uint64_t level1_budget, bool& exact) {
  exact = true;
  switch (spec.design) {
    case Design::Srs: return srs_inclusion(N, spec.sample_size());
    case Design::Level0: return level0_inclusion(spec, N, exec);
    case Design::Level2: return level2_inclusion(spec, N, exec);
    case Design::Level1:
      try {
        return level1_inclusion(spec, N, level1_budget, exec);
      } catch (const budget_exceeded_error&) {
        exact = false;
        return mc_inclusion(N, spec, mc_reps, seed, exec);
      }
  }
  throw std::logic_error("exact_or_mc_table: unreachable");
}

// Empirical moments of per-replication estimates, reduced in replication
// order; re_se from 10 equal batches.
struct MomentRows {
  std::vector<double> mean, var, mse;
  std::vector<std::vector<double>> batch_var, batch_mse;  // [batch][cell]
};

MomentRows reduce_cells(const std::vector<double>& values, std::uint64_t reps,
                        std::size_t cells, const std::vector<double>& truth) {
  constexpr int kBatches = 10;
  MomentRows out;
  out.mean.assign(cells, 0.0);
  out.var.assign(cells, 0.0);
  out.mse.assign(cells, 0.0);
  out.batch_var.assign(kBatches, std::vector<double>(cells, 0.0));
  out.batch_mse.assign(kBatches, std::vector<double>(cells, 0.0));
  std::vector<double> batch_mean(static_cast<std::size_t>(kBatches) * cells, 0.0);
  std::vector<std::uint64_t> batch_n(kBatches, 0);
  for (std::uint64_t rep = 0; rep < reps; ++rep) {
    const int b = static_cast<int>(rep * kBatches / reps);
    ++batch_n[static_cast<std::size_t>(b)];
    for (std::size_t c = 0; c < cells; ++c) {
      const double v = values[static_cast<std::size_t>(rep) * cells + c];
      out.mean[c] += v;
      batch_mean[static_cast<std::size_t>(b) * cells + c] += v;
    }
  }
  for (std::size_t c = 0; c < cells; ++c) out.mean[c] /= static_cast<double>(reps);
  for (int b = 0; b < kBatches; ++b)
    for (std::size_t c = 0; c < cells; ++c)
      batch_mean[static_cast<std::size_t>(b) * cells + c] /=
          static_cast<double>(batch_n[static_cast<std::size_t>(b)]);
  for (std::uint64_t rep = 0; rep < reps; ++rep) {
    const int b = static_cast<int>(rep * kBatches / reps);
    for (std::size_t c = 0; c < cells; ++c) {
      const double v = values[static_cast<std::size_t>(rep) * cells + c];
      const double dm = v - out.mean[c];
      const double dt = v - truth[c];
      out.var[c] += dm * dm;
      out.mse[c] += dt * dt;
      const double dbm = v - batch_mean[static_cast<std::size_t>(b) * cells + c];
      out.batch_var[static_cast<std::size_t>(b)][c] += dbm * dbm;
      out.batch_mse[static_cast<std::size_t>(b)][c] += dt * dt;
    }
  }
  for (std::size_t c = 0; c < cells; ++c) {
    out.var[c] /= static_cast<double>(reps);
    out.mse[c] /= static_cast<double>(reps);
  }
  for (int b = 0; b < kBatches; ++b)
    for (std::size_t c = 0; c < cells; ++c) {
      out.batch_var[static_cast<std::size_t>(b)][c] /=
          static_cast<double>(batch_n[static_cast<std::size_t>(b)]);
      out.batch_mse[static_cast<std::size_t>(b)][c] /=
          static_cast<double>(batch_n[static_cast<std::size_t>(b)]);
    }
  return out;
}

double batch_se(const std::vector<double>& per_batch) {
  const std::size_t B = per_batch.size();
  double mean = 0.0;
  for (double v : per_batch) mean += v;
  mean /= static_cast<double>(B);
  double ss = 0.0;
  for (double v : per_batch) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(B - 1) / static_cast<double>(B));
}

}  // namespace

REResult run_perfect_re(const SimulationConfig& config, Exec exec,
                        std::uint64_t mc_fallback_reps, std::uint64_t level1_state_budget) {
  SimulationConfig cfg = config;
  cfg.rho = 1.0;
  cfg.validate_feasible();
  const Population pop = Population::grid(cfg.population_size, cfg.dist);
  const std::vector<GridPoint> grid = make_grid(pop, cfg.p_grid);
  const int N = cfg.population_size;

  const InclusionTable srs_table = srs_inclusion(N, cfg.set_size * cfg.cycles);
  std::vector<double> v_srs(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g)
    v_srs[g] = true_variance(pop, srs_table, grid[g].x, exec);

  REResult result;
  result.config = cfg;
  for (Design d : cfg.designs) {
    const DesignSpec spec = cfg.spec_for(d);
    bool exact = true;
    const InclusionTable table = exact_or_mc_table(spec, N, exec, mc_fallback_reps,
                                                   cfg.master_seed + 101, level1_state_budget,
                                                   exact);
    if (exact) {
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const double vt = true_variance(pop, table, grid[g].x, exec);
        RERow row;
        row.design = d;
        row.p = grid[g].p;
        row.x_p = grid[g].x;
        row.f_true = grid[g].f;
        row.bias = 0.0;
        row.variance = vt;
        row.mse = vt;
        row.re = (vt == v_srs[g]) ? 1.0 : v_srs[g] / vt;
        row.re_se = 0.0;
        row.exact = true;
        result.rows.push_back(row);
      }
      continue;
    }
    // Monte Carlo fallback: empirical variance of the weighted EDF.
    const std::uint64_t reps = mc_fallback_reps;
    const std::size_t cells = grid.size();
    std::vector<double> fhat(static_cast<std::size_t>(reps) * cells, 0.0);
    for_index(static_cast<std::int64_t>(reps), exec, [&](std::int64_t rep) {
      RandomStream rng = RandomStream::substream(cfg.master_seed, static_cast<std::uint64_t>(rep));
      const RankedSetSample sample = draw_rss(pop, spec, Ranking::Perfect, rng);
      const EdfEstimate edf = hajek_edf(sample, table);
      for (std::size_t g = 0; g < cells; ++g)
        fhat[static_cast<std::size_t>(rep) * cells + g] = edf.value(grid[g].x);
    });
    std::vector<double> truth(cells);
    for (std::size_t g = 0; g < cells; ++g) truth[g] = grid[g].f;
    const MomentRows mom = reduce_cells(fhat, reps, cells, truth);
    for (std::size_t g = 0; g < cells; ++g) {
      RERow row;
      row.design = d;
      row.p = grid[g].p;
      row.x_p = grid[g].x;
      row.f_true = grid[g].f;
      row.bias = mom.mean[g] - grid[g].f;
      row.variance = mom.var[g];
      row.mse = mom.mse[g];
      row.re = v_srs[g] / mom.var[g];
      std::vector<double> res(mom.batch_var.size());
      for (std::size_t b = 0; b < res.size(); ++b) res[b] = v_srs[g] / mom.batch_var[b][g];
      row.re_se = batch_se(res);
      row.exact = false;
      result.rows.push_back(row);
    }
  }
  return result;
}

REResult run_imperfect_re(const SimulationConfig& config, Exec exec,
                          std::uint64_t level1_state_budget) {
  SimulationConfig cfg = config;
  cfg.validate_feasible();
  const Population pop = Population::grid(cfg.population_size, cfg.dist);
  const std::vector<GridPoint> grid = make_grid(pop, cfg.p_grid);
  const int N = cfg.population_size;
  const std::size_t cells = grid.size();
  const std::uint64_t reps = cfg.reps;

  // Inclusion tables are rank-pattern functionals of the consistent
  // ranking; under imperfect ranking a unit's probability is read at its
  // judgment rank (the draws record that rank per entry).
  std::vector<DesignSpec> specs;
  std::vector<InclusionTable> tables;
  for (Design d : cfg.designs) {
    const DesignSpec spec = cfg.spec_for(d);
    bool exact = true;
    tables.push_back(exact_or_mc_table(spec, N, exec, 100000, cfg.master_seed + 101,
                                       level1_state_budget, exact));
    specs.push_back(spec);
  }

  const std::size_t D = cfg.designs.size();
  std::vector<double> fhat(static_cast<std::size_t>(reps) * D * cells, 0.0);
  for_index(static_cast<std::int64_t>(reps), exec, [&](std::int64_t rep) {
    RandomStream rng = RandomStream::substream(cfg.master_seed, static_cast<std::uint64_t>(rep));
    const Population judged =
        (cfg.rho < 1.0) ? pop.with_auxiliary(cfg.rho, rng) : pop;
    const Ranking ranking = (cfg.rho < 1.0) ? Ranking::ByAuxiliary : Ranking::Perfect;
    for (std::size_t di = 0; di < D; ++di) {
      const RankedSetSample sample =
          (cfg.designs[di] == Design::Srs)
              ? draw_srs_wor(judged, specs[di].sample_size(), rng)
              : draw_rss(judged, specs[di], ranking, rng);
      const EdfEstimate edf = hajek_edf(sample, tables[di]);
      for (std::size_t g = 0; g < cells; ++g)
        fhat[(static_cast<std::size_t>(rep) * D + di) * cells + g] = edf.value(grid[g].x);
    }
  });

  // Slice per design, reduce in replication order.
  REResult result;
  result.config = cfg;
  std::vector<double> truth(cells);
  for (std::size_t g = 0; g < cells; ++g) truth[g] = grid[g].f;

  std::vector<MomentRows> moments(D);
  std::vector<double> slice(static_cast<std::size_t>(reps) * cells);
  for (std::size_t di = 0; di < D; ++di) {
    for (std::uint64_t rep = 0; rep < reps; ++rep)
      for (std::size_t g = 0; g < cells; ++g)
        slice[static_cast<std::size_t>(rep) * cells + g] =
            fhat[(static_cast<std::size_t>(rep) * D + di) * cells + g];
    moments[di] = reduce_cells(slice, reps, cells, truth);
  }
  const auto srs_it = std::find(cfg.designs.begin(), cfg.designs.end(), Design::Srs);
  if (srs_it == cfg.designs.end())
    throw std::invalid_argument("imperfect-ranking study needs SRS in the design list");
  const std::size_t srs_idx = static_cast<std::size_t>(srs_it - cfg.designs.begin());

  for (std::size_t di = 0; di < D; ++di) {
    for (std::size_t g = 0; g < cells; ++g) {
      RERow row;
      row.design = cfg.designs[di];
      row.p = grid[g].p;
      row.x_p = grid[g].x;
      row.f_true = grid[g].f;
      row.bias = moments[di].mean[g] - grid[g].f;
      row.variance = moments[di].var[g];
      row.mse = moments[di].mse[g];
      row.re = moments[srs_idx].var[g] / moments[di].mse[g];
      std::vector<double> res(moments[di].batch_var.size());
      for (std::size_t b = 0; b < res.size(); ++b)
        res[b] = moments[srs_idx].batch_var[b][g] / moments[di].batch_mse[b][g];
      row.re_se = batch_se(res);
      row.exact = false;
      result.rows.push_back(row);
    }
  }
  return result;
}

InvarianceReport distribution_invariance_check(int N, int m, int k,
                                               const std::vector<double>& p_grid,
                                               Exec exec) {
  const DistributionKind kinds[] = {DistributionKind::StandardNormal,
                                    DistributionKind::StandardUniform,
                                    DistributionKind::StandardExponential,
                                    DistributionKind::Beta52};
  InvarianceReport report;
  bool first = true;
  for (DistributionKind kind : kinds) {
    SimulationConfig cfg;
    cfg.population_size = N;
    cfg.dist = kind;
    cfg.set_size = k;
    cfg.cycles = m;
    cfg.p_grid = p_grid;
    cfg.designs.clear();
    for (Design d : {Design::Srs, Design::Level0, Design::Level1, Design::Level2})
      if (is_feasible(cfg.spec_for(d), N)) cfg.designs.push_back(d);
    const REResult res = run_perfect_re(cfg, exec);
    if (first) {
      report.reference = res.rows;
      first = false;
      continue;
    }
    for (std::size_t idx = 0; idx < res.rows.size(); ++idx)
      report.max_spread = std::max(
          report.max_spread, std::fabs(res.rows[idx].re - report.reference[idx].re));
  }
  return report;
}

std::string results_csv(const REResult& result) {
  std::ostringstream os;
  os << "design,p,bias,variance,mse,re,re_se\n";
  for (const RERow& row : result.rows)
    os << design_name(row.design) << ',' << format_double(row.p) << ','
       << format_double(row.bias) << ',' << format_double(row.variance) << ','
       << format_double(row.mse) << ',' << format_double(row.re) << ','
       << format_double(row.re_se) << '\n';
  return os.str();
}

}  // namespace rss
