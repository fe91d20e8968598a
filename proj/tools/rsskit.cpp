// rsskit: finite-population ranked-set sampling toolkit.
//
// Subcommands: gen-pop, inclusion, sample, estimate, simulate, verify,
// field-session.  Every run with a --seed is fully reproducible; exit codes
// are 0 success, 2 usage error, 3 infeasible design, 4 verification failure.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rss/decomposition.hpp"
#include "rss/designs.hpp"
#include "rss/errors.hpp"
#include "rss/estimators.hpp"
#include "rss/inclusion.hpp"
#include "rss/io.hpp"
#include "rss/population.hpp"
#include "rss/simulation.hpp"

using nlohmann::json;
using namespace rss;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitVerification = 4;

void write_text(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  write_file(resolve_output_path(path), content);
}

DesignSpec spec_from_flags(const std::string& design, int k, int m, int sample_size,
                           const std::vector<int>& pattern) {
  const Design d = design_from_name(design);
  if (d == Design::Srs) {
    const int n = sample_size > 0 ? sample_size : m * k;
    return DesignSpec::srs(n);
  }
  if (!pattern.empty()) {
    DesignSpec spec;
    spec.design = d;
    spec.set_size = k;
    spec.cycles = m;
    spec.rank_pattern = pattern;
    spec.validate();
    return spec;
  }
  return DesignSpec::balanced(d, k, m);
}

// ---------------------------------------------------------------- gen-pop

int cmd_gen_pop(int n, const std::string& dist, std::optional<double> rho,
                std::uint64_t seed, const std::string& out) {
  Population pop = Population::grid(n, distribution_from_name(dist));
  if (rho) {
    RandomStream rng(seed);
    pop = pop.with_auxiliary(*rho, rng);
  }
  std::ostringstream os;
  write_population_csv(os, pop);
  write_text(out, os.str());
  return 0;
}

// --------------------------------------------------------------- inclusion

int cmd_inclusion(int n, const std::string& design, int k, int m, int sample_size,
                  const std::string& method, std::uint64_t reps, std::uint64_t seed,
                  const std::string& out) {
  const DesignSpec spec = spec_from_flags(design, k, m, sample_size, {});
  const InclusionTable table =
      compute_inclusion(spec, n, method_from_name(method), reps, seed);
  write_text(out, inclusion_to_json(table) + "\n");
  return 0;
}

// ------------------------------------------------------------------ sample

int cmd_sample(const std::string& pop_path, const std::string& design, int k, int m,
               int sample_size, const std::vector<int>& pattern, const std::string& ranking,
               std::uint64_t seed, const std::string& out) {
  std::ifstream in(pop_path);
  if (!in) throw std::runtime_error("cannot open population file " + pop_path);
  const Population pop = read_population_csv(in);
  const DesignSpec spec = spec_from_flags(design, k, m, sample_size, pattern);
  RandomStream rng(seed);
  const Ranking mode = (ranking == "aux") ? Ranking::ByAuxiliary : Ranking::Perfect;
  const RankedSetSample sample = (spec.design == Design::Srs)
                                     ? draw_srs_wor(pop, spec.sample_size(), rng)
                                     : draw_rss(pop, spec, mode, rng);
  std::ostringstream os;
  write_sample_csv(os, sample);
  write_text(out, os.str());
  return 0;
}

// ---------------------------------------------------------------- estimate

json report_point(const RankedSetSample& sample, const InclusionTable& table,
                  const EdfEstimate& edf, double x, double alpha) {
  json j;
  j["x"] = x;
  j["F_hat"] = edf.value(x);
  const double vhat = syg_variance_estimate(sample, table, x);
  j["V_hat"] = vhat;
  if (vhat >= 0.0) {
    const Interval ci = pointwise_ci(edf.value(x), vhat, alpha);
    j["ci_low"] = ci.lo;
    j["ci_high"] = ci.hi;
    if (ci.truncated) j["ci_truncated"] = true;
  } else {
    j["warning"] = "negative variance estimate; no interval";
  }
  j["alpha"] = alpha;
  return j;
}

int cmd_estimate(const std::string& sample_path, const std::string& inclusion_path,
                 const std::vector<double>& at, bool want_median_ci, double alpha,
                 const std::string& rule_name, bool assign_ranks,
                 const std::string& edf_out, const std::string& report_out) {
  std::ifstream in(sample_path);
  if (!in) throw std::runtime_error("cannot open sample file " + sample_path);
  RankedSetSample sample = read_sample_csv(in);
  const InclusionTable table = inclusion_from_json(read_file(inclusion_path));

  const bool unknown_units =
      std::any_of(sample.entries.begin(), sample.entries.end(),
                  [](const SampleEntry& e) { return e.measured && e.unit < 0; });
  if (unknown_units || assign_ranks) {
    // Field data without unit labels: spread the measured values over the
    // expected order-statistic positions of the population.
    std::vector<double> values;
    for (const auto& e : sample.entries)
      if (e.measured) values.push_back(e.value);
    const std::vector<int> ranks = assign_expected_ranks(values, table.population_size);
    std::size_t next = 0;
    for (auto& e : sample.entries)
      if (e.measured) {
        e.weight_rank = ranks[next++];
        e.unit = e.weight_rank - 1;
      }
  }

  const QuantileRule rule =
      (rule_name == "interp") ? QuantileRule::Interpolated : QuantileRule::Step;
  const EdfEstimate edf = hajek_edf(sample, table);

  std::ostringstream edf_csv;
  write_edf_csv(edf_csv, edf);
  write_text(edf_out, edf_csv.str());

  json report;
  report["alpha"] = alpha;
  report["points"] = json::array();
  for (double x : at) report["points"].push_back(report_point(sample, table, edf, x, alpha));
  if (want_median_ci) {
    const MedianCi mci = median_ci(sample, table, alpha, rule);
    report["median"] = {{"M_hat", mci.median}, {"V_hat", mci.vhat},  {"c1", mci.c1},
                        {"c2", mci.c2},        {"ci_low", mci.lo},   {"ci_high", mci.hi},
                        {"rule", rule_name}};
  }
  write_text(report_out, report.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::string& config_path, const std::string& out, int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
  const SimulationConfig cfg = simulation_config_from_json(read_file(config_path));
  const REResult result =
      (cfg.rho >= 1.0) ? run_perfect_re(cfg) : run_imperfect_re(cfg);
  write_text(out, results_csv(result));
  return 0;
}

// ------------------------------------------------------------------ verify

struct CheckSink {
  int failures = 0;
  void operator()(const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << name;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  }
};

void verify_inclusion_sums(CheckSink& check, int N, int k) {
  double worst_rank = 0.0, worst_unit = 0.0;
  for (int r = 1; r <= k; ++r) {
    double total = 0.0;
    for (int i = 1; i <= N; ++i) total += order_statistic_prob(i, r, k, N);
    worst_rank = std::max(worst_rank, std::fabs(total - 1.0));
  }
  for (int i = 1; i <= N; ++i) {
    double total = 0.0;
    for (int r = 1; r <= k; ++r) total += order_statistic_prob(i, r, k, N);
    worst_unit = std::max(worst_unit, std::fabs(total - static_cast<double>(k) / N));
  }
  check("set-rank probabilities sum to one per rank", worst_rank < 1e-12,
        "max residual " + format_double(worst_rank));
  check("set-rank probabilities sum to k/N per unit", worst_unit < 1e-12,
        "max residual " + format_double(worst_unit));
}

void verify_design(CheckSink& check, const DesignSpec& spec, int N) {
  InclusionTable table;
  switch (spec.design) {
    case Design::Srs: table = srs_inclusion(N, spec.sample_size()); break;
    case Design::Level0: table = level0_inclusion(spec, N); break;
    case Design::Level1: table = level1_inclusion(spec, N); break;
    case Design::Level2: table = level2_inclusion(spec, N); break;
  }
  try {
    table.check_basic_invariants();
    check("table positivity / symmetry / dominance", true);
  } catch (const verification_error& e) {
    check("table positivity / symmetry / dominance", false, e.what());
  }
  const double sum = table.sum_first();
  if (spec.design == Design::Level0)
    check("sum of first-order probabilities <= n", sum <= spec.sample_size() + 1e-9,
          "sum " + format_double(sum));
  else
    check("sum of first-order probabilities == n",
          std::fabs(sum - spec.sample_size()) < 1e-9, "sum " + format_double(sum));

  // Exhaustive enumeration cross-check when affordable.
  try {
    const InclusionTable enumerated = enumerate_inclusion(N, spec, 2'000'000);
    double worst = 0.0;
    for (std::size_t i = 0; i < table.first.size(); ++i)
      worst = std::max(worst, std::fabs(table.first[i] - enumerated.first[i]));
    for (std::size_t i = 0; i < table.second.size(); ++i)
      worst = std::max(worst, std::fabs(table.second[i] - enumerated.second[i]));
    check("table matches exhaustive enumeration", worst < 1e-12,
          "max residual " + format_double(worst));
  } catch (const budget_exceeded_error&) {
    // too large to enumerate; the Monte Carlo gate below still applies
  }

  const InclusionTable mc = mc_inclusion(N, spec, 100000, 20240229);
  double worst_se = 0.0;
  for (std::size_t i = 0; i < table.first.size(); ++i) {
    const double se = std::sqrt(std::max(table.first[i] * (1.0 - table.first[i]), 1e-12) /
                                static_cast<double>(mc.mc_reps));
    worst_se = std::max(worst_se, std::fabs(table.first[i] - mc.first[i]) / se);
  }
  check("table matches Monte Carlo within 4 standard errors", worst_se < 4.0,
        "worst |z| " + format_double(worst_se));
}

void verify_decomposition(CheckSink& check, const DesignSpec& spec, int N,
                          std::optional<double> x_opt) {
  const Population pop = Population::grid(N, DistributionKind::StandardUniform);
  const double x = x_opt.value_or(pop.quantile_value(0.5));
  const DecompositionReport rep = variance_decomposition_report(pop, spec, x);
  std::cout << rep.summary();
  check("variance decomposition identity", rep.identity_residual < 1e-10,
        "residual " + format_double(rep.identity_residual));
  check("partitioned-sample identity", rep.partition_identity_residual < 1e-10,
        "residual " + format_double(rep.partition_identity_residual));
  check("cross-set covariances non-positive", rep.max_cross_set_cov < 1e-10,
        "max " + format_double(rep.max_cross_set_cov));
  check("within-set covariances non-negative", rep.min_within_cov > -1e-10,
        "min " + format_double(rep.min_within_cov));
  check("design variance does not exceed srs variance",
        rep.weighted_variance_design <= rep.weighted_variance_srs + 1e-12,
        format_double(rep.weighted_variance_design) + " vs " +
            format_double(rep.weighted_variance_srs));
  if (rep.closed_form_cross_residual >= 0.0)
    check("closed-form cross covariances match enumeration",
          rep.closed_form_cross_residual < 1e-10,
          "residual " + format_double(rep.closed_form_cross_residual));
}

void verify_dominance(CheckSink& check, int N, int m, int k) {
  SimulationConfig cfg;
  cfg.population_size = N;
  cfg.set_size = k;
  cfg.cycles = m;
  cfg.designs.clear();
  for (Design d : {Design::Srs, Design::Level0, Design::Level1, Design::Level2})
    if (is_feasible(cfg.spec_for(d), N)) cfg.designs.push_back(d);
  const REResult res = run_perfect_re(cfg);
  double min_re = 1e300;
  for (const RERow& row : res.rows) min_re = std::min(min_re, row.re);
  check("relative efficiency >= 1 at all deciles (N=" + std::to_string(N) + ", k=" +
            std::to_string(k) + ", m=" + std::to_string(m) + ")",
        min_re >= 1.0 - 1e-9, "min RE " + format_double(min_re));
}

int cmd_verify(std::optional<int> n, std::optional<std::string> design, int k, int m,
               std::optional<double> x) {
  CheckSink check;
  if (n && design) {
    const DesignSpec spec = spec_from_flags(*design, k, m, 0, {});
    if (!is_feasible(spec, *n))
      throw infeasible_design_error("requested verify config is infeasible");
    verify_inclusion_sums(check, *n, spec.set_size);
    verify_design(check, spec, *n);
    verify_decomposition(check, spec, *n, x);
  } else {
    // Default battery over small exactly-enumerable configs.
    verify_inclusion_sums(check, 20, 3);
    verify_inclusion_sums(check, 224, 3);
    for (const auto& [d, NN, kk, mm] :
         {std::tuple{Design::Level0, 6, 2, 1}, std::tuple{Design::Level1, 5, 2, 1},
          std::tuple{Design::Level2, 6, 2, 1}, std::tuple{Design::Level2, 9, 2, 2}}) {
      const DesignSpec spec = DesignSpec::balanced(d, kk, mm);
      std::cout << "-- design " << design_name(d) << " N=" << NN << " k=" << kk
                << " m=" << mm << "\n";
      verify_design(check, spec, NN);
      verify_decomposition(check, spec, NN, std::nullopt);
    }
    verify_dominance(check, 20, 1, 2);
    verify_dominance(check, 20, 1, 3);
  }
  if (check.failures > 0) {
    std::cout << check.failures << " check(s) failed\n";
    return kExitVerification;
  }
  std::cout << "all checks passed\n";
  return 0;
}

// ------------------------------------------------------------ field-session

class ResponseReader {
 public:
  ResponseReader(std::istream& interactive, std::optional<std::ifstream> scripted)
      : interactive_(interactive), scripted_(std::move(scripted)) {}

  std::string next_line() {
    std::string line;
    if (scripted_) {
      if (!std::getline(*scripted_, line))
        throw std::runtime_error("response file exhausted before the session finished");
      std::cout << line << "\n";  // echo into the transcript
      return line;
    }
    if (!std::getline(interactive_, line))
      throw std::runtime_error("input closed before the session finished");
    return line;
  }

 private:
  std::istream& interactive_;
  std::optional<std::ifstream> scripted_;
};

int cmd_field_session(const std::string& pop_path, const std::string& design, int k, int m,
                      std::uint64_t seed, const std::string& responses, bool use_aux,
                      double alpha, const std::string& out_prefix) {
  std::ifstream in(pop_path);
  if (!in) throw std::runtime_error("cannot open population file " + pop_path);
  const Population pop = read_population_csv(in);
  const DesignSpec spec = spec_from_flags(design, k, m, 0, {});
  if (spec.design == Design::Srs)
    throw CLI::ValidationError("field-session needs a ranked-set design (l0|l1|l2)");
  if (!is_feasible(spec, pop.size()))
    throw infeasible_design_error("field session design infeasible for this population");
  if (use_aux && !pop.has_auxiliary())
    throw CLI::ValidationError("--use-aux requested but the population has no y column");

  std::optional<std::ifstream> scripted;
  if (!responses.empty()) {
    scripted.emplace(responses);
    if (!*scripted) throw std::runtime_error("cannot open response file " + responses);
  }
  ResponseReader reader(std::cin, std::move(scripted));

  const int n = spec.sample_size();
  RandomStream rng(seed);
  std::vector<int> pool(static_cast<std::size_t>(pop.size()));
  for (int u = 0; u < pop.size(); ++u) pool[static_cast<std::size_t>(u)] = u;

  RankedSetSample sample;
  sample.spec = spec;
  sample.ranking = Ranking::ByAuxiliary;

  std::vector<int> set(static_cast<std::size_t>(k));
  for (int h = 1; h <= n; ++h) {
    const int r_h = spec.rank_pattern[static_cast<std::size_t>(h - 1)];
    for (int j = 0; j < k; ++j) {
      const std::size_t pick =
          static_cast<std::size_t>(j) +
          static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(pool.size() - static_cast<std::size_t>(j))));
      std::swap(pool[static_cast<std::size_t>(j)], pool[pick]);
      set[static_cast<std::size_t>(j)] = pool[static_cast<std::size_t>(j)];
    }
    std::cout << "set " << h << " of " << n << ": drawn unit ids";
    for (int u : set) std::cout << ' ' << (u + 1);
    std::cout << "\n";

    std::vector<int> judged(static_cast<std::size_t>(k));  // judged[j] = rank of set[j]
    if (use_aux) {
      std::vector<int> order(static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j) order[static_cast<std::size_t>(j)] = j;
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return pop.judgment_rank(set[static_cast<std::size_t>(a)]) <
               pop.judgment_rank(set[static_cast<std::size_t>(b)]);
      });
      for (int pos = 0; pos < k; ++pos)
        judged[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos + 1;
      std::cout << "auxiliary ranking:";
      for (int j = 0; j < k; ++j) std::cout << ' ' << judged[static_cast<std::size_t>(j)];
      std::cout << "\n";
    } else {
      for (;;) {
        std::cout << "enter ranks for these units, smallest=1 (permutation of 1.." << k
                  << "): " << std::flush;
        std::istringstream ls(reader.next_line());
        std::vector<int> attempt;
        int v;
        while (ls >> v) attempt.push_back(v);
        std::vector<int> sorted = attempt;
        std::sort(sorted.begin(), sorted.end());
        bool ok = static_cast<int>(attempt.size()) == k;
        for (int j = 0; ok && j < k; ++j) ok = sorted[static_cast<std::size_t>(j)] == j + 1;
        if (ok) {
          judged = attempt;
          break;
        }
        std::cout << "invalid ranking: need each of 1.." << k << " exactly once\n";
      }
    }

    int measured_unit = -1;
    for (int j = 0; j < k; ++j)
      if (judged[static_cast<std::size_t>(j)] == r_h) measured_unit = set[static_cast<std::size_t>(j)];
    std::cout << "measure unit " << (measured_unit + 1) << " (judged rank " << r_h << ")\n";

    double value = 0.0;
    for (;;) {
      std::cout << "measured value for unit " << (measured_unit + 1) << ": " << std::flush;
      const std::string line = reader.next_line();
      try {
        std::size_t pos = 0;
        value = std::stod(line, &pos);
        std::string rest = line.substr(pos);
        if (rest.find_first_not_of(" \t\r") != std::string::npos)
          throw std::invalid_argument("trailing characters");
        break;
      } catch (const std::exception&) {
        std::cout << "not a number, try again\n";
      }
    }

    for (int j = 0; j < k; ++j) {
      const int unit = set[static_cast<std::size_t>(j)];
      SampleEntry e;
      e.set_index = h;
      e.in_set_rank = judged[static_cast<std::size_t>(j)];
      e.unit = unit;
      e.measured = unit == measured_unit;
      e.value = e.measured ? value : std::numeric_limits<double>::quiet_NaN();
      e.weight_rank = unit + 1;
      sample.entries.push_back(e);
    }

    switch (spec.design) {
      case Design::Level0:
        break;
      case Design::Level1: {
        auto it = std::find(pool.begin(), pool.end(), measured_unit);
        std::swap(*it, pool.back());
        pool.pop_back();
        break;
      }
      case Design::Level2:
        for (int j = 0; j < k; ++j) {
          auto it = std::find(pool.begin(), pool.end(), set[static_cast<std::size_t>(j)]);
          std::swap(*it, pool.back());
          pool.pop_back();
        }
        break;
      case Design::Srs:
        break;
    }
  }

  // Sort entries within each set so the CSV reads smallest-to-largest.
  std::stable_sort(sample.entries.begin(), sample.entries.end(),
                   [](const SampleEntry& a, const SampleEntry& b) {
                     return a.set_index != b.set_index ? a.set_index < b.set_index
                                                       : a.in_set_rank < b.in_set_rank;
                   });

  const std::string sample_path = resolve_output_path(out_prefix + "_sample.csv");
  {
    std::ostringstream os;
    write_sample_csv(os, sample);
    write_file(sample_path, os.str());
  }

  InclusionTable table;
  switch (spec.design) {
    case Design::Level0: table = level0_inclusion(spec, pop.size()); break;
    case Design::Level1:
      try {
        table = level1_inclusion(spec, pop.size(), 300'000'000);
      } catch (const budget_exceeded_error&) {
        table = mc_inclusion(pop.size(), spec, 200000, seed + 17);
      }
      break;
    case Design::Level2: table = level2_inclusion(spec, pop.size()); break;
    case Design::Srs: break;
  }
  const EdfEstimate edf = hajek_edf(sample, table);
  const std::string edf_path = resolve_output_path(out_prefix + "_edf.csv");
  {
    std::ostringstream os;
    write_edf_csv(os, edf);
    write_file(edf_path, os.str());
  }
  json report;
  report["sample_csv"] = sample_path;
  report["edf_csv"] = edf_path;
  const double m_hat = edf.quantile(0.5);
  std::string ci_text = "unavailable";
  try {
    const MedianCi mci = median_ci(sample, table, alpha, QuantileRule::Interpolated);
    report["median"] = {{"M_hat", mci.median}, {"V_hat", mci.vhat}, {"c1", mci.c1},
                        {"c2", mci.c2},        {"ci_low", mci.lo},  {"ci_high", mci.hi}};
    ci_text = "(" + format_double(mci.lo) + ", " + format_double(mci.hi) + ")";
  } catch (const std::domain_error& e) {
    report["median"] = {{"M_hat", m_hat}, {"warning", e.what()}};
  }
  const std::string report_path = resolve_output_path(out_prefix + "_report.json");
  write_file(report_path, report.dump(2) + "\n");
  std::cout << "session complete: " << n << " measurements\n"
            << "estimated median " << format_double(m_hat) << ", 95% CI " << ci_text << "\n"
            << "wrote " << sample_path << ", " << edf_path << ", " << report_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-population ranked-set sampling toolkit"};
  app.require_subcommand(1);

  // gen-pop
  auto* gen = app.add_subcommand("gen-pop", "generate a quantile-grid population CSV");
  int gen_n = 0;
  std::string gen_dist;
  double gen_rho = 1.0;
  bool gen_has_rho = false;
  std::uint64_t gen_seed = 0;
  std::string gen_out, gen_format = "csv";
  gen->add_option("--n", gen_n, "population size")->required();
  gen->add_option("--dist", gen_dist, "normal|uniform|exp|beta52")->required();
  auto* rho_opt = gen->add_option("--rho", gen_rho, "attach auxiliary with this correlation");
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "output file (default stdout)");
  gen->add_option("--format", gen_format)->check(CLI::IsMember({"csv"}));
  gen->callback([&] { gen_has_rho = rho_opt->count() > 0; });

  // inclusion
  auto* inc = app.add_subcommand("inclusion", "compute an inclusion-probability table");
  int inc_n = 0, inc_k = 1, inc_m = 1, inc_sample = 0;
  std::string inc_design, inc_method = "closed", inc_out, inc_format = "json";
  std::uint64_t inc_reps = 100000, inc_seed = 0;
  inc->add_option("--n", inc_n, "population size")->required();
  inc->add_option("--design", inc_design, "srs|l0|l1|l2")->required();
  inc->add_option("--k", inc_k, "set size");
  inc->add_option("--m", inc_m, "cycles");
  inc->add_option("--sample-size", inc_sample, "sample size (srs only)");
  inc->add_option("--method", inc_method)->check(CLI::IsMember({"closed", "exact", "mc"}));
  inc->add_option("--reps", inc_reps, "Monte Carlo replications");
  inc->add_option("--seed", inc_seed, "random seed");
  inc->add_option("--out", inc_out, "output file (default stdout)");
  inc->add_option("--format", inc_format)->check(CLI::IsMember({"json"}));

  // sample
  auto* smp = app.add_subcommand("sample", "draw a sample from a population CSV");
  std::string smp_pop, smp_design, smp_ranking = "perfect", smp_out;
  int smp_k = 1, smp_m = 1, smp_sample = 0;
  std::vector<int> smp_pattern;
  std::uint64_t smp_seed = 0;
  smp->add_option("--pop", smp_pop, "population CSV")->required();
  smp->add_option("--design", smp_design, "srs|l0|l1|l2")->required();
  smp->add_option("--k", smp_k, "set size");
  smp->add_option("--m", smp_m, "cycles");
  smp->add_option("--sample-size", smp_sample, "sample size (srs only)");
  smp->add_option("--pattern", smp_pattern, "explicit rank pattern (m*k entries)");
  smp->add_option("--ranking", smp_ranking)->check(CLI::IsMember({"perfect", "aux"}));
  smp->add_option("--seed", smp_seed, "random seed");
  smp->add_option("--out", smp_out, "output file (default stdout)");
  std::string smp_format = "csv";
  smp->add_option("--format", smp_format)->check(CLI::IsMember({"csv"}));

  // estimate
  auto* est = app.add_subcommand("estimate", "weighted EDF, variance and intervals");
  std::string est_sample, est_inclusion, est_rule = "step", est_edf_out, est_report_out;
  std::vector<double> est_at;
  bool est_median = false, est_assign = false;
  double est_alpha = 0.05;
  est->add_option("--sample", est_sample, "sample CSV")->required();
  est->add_option("--inclusion", est_inclusion, "inclusion table JSON")->required();
  est->add_option("--at", est_at, "evaluation points for pointwise reports");
  est->add_flag("--median-ci", est_median, "add a median confidence interval");
  est->add_option("--alpha", est_alpha, "interval level (default 0.05)");
  est->add_option("--rule", est_rule, "quantile inversion rule")
      ->check(CLI::IsMember({"step", "interp"}));
  est->add_flag("--assign-ranks", est_assign,
                "assign expected order-statistic ranks to measured rows");
  est->add_option("--edf-out", est_edf_out, "EDF CSV output (default stdout)");
  est->add_option("--report-out", est_report_out, "report JSON output (default stdout)");
  std::string est_format = "json";
  est->add_option("--format", est_format)->check(CLI::IsMember({"json"}));

  // simulate
  auto* sim = app.add_subcommand("simulate", "run a relative-efficiency experiment");
  std::string sim_config, sim_out;
  int sim_threads = 0;
  sim->add_option("--config", sim_config, "configuration JSON")->required();
  sim->add_option("--out", sim_out, "results CSV output (default stdout)");
  sim->add_option("--threads", sim_threads, "worker threads (default: all)");

  // verify
  auto* ver = app.add_subcommand("verify", "run the invariant battery");
  int ver_n = 0, ver_k = 2, ver_m = 1;
  std::string ver_design;
  double ver_x = 0.0;
  auto* ver_n_opt = ver->add_option("--n", ver_n, "population size");
  auto* ver_design_opt = ver->add_option("--design", ver_design, "srs|l0|l1|l2");
  ver->add_option("--k", ver_k, "set size");
  ver->add_option("--m", ver_m, "cycles");
  auto* ver_x_opt = ver->add_option("--x", ver_x, "evaluation point");

  // field-session
  auto* fld = app.add_subcommand("field-session", "interactive set-by-set sampling");
  std::string fld_pop, fld_design = "l2", fld_responses, fld_prefix = "session";
  int fld_k = 0, fld_m = 0;
  std::uint64_t fld_seed = 0;
  bool fld_aux = false;
  double fld_alpha = 0.05;
  fld->add_option("--pop-csv", fld_pop, "population CSV")->required();
  fld->add_option("--design", fld_design, "l0|l1|l2")->required();
  fld->add_option("--k", fld_k, "set size")->required();
  fld->add_option("--m", fld_m, "cycles")->required();
  fld->add_option("--seed", fld_seed, "random seed for set draws");
  fld->add_option("--responses", fld_responses, "replay operator answers from this file");
  fld->add_flag("--use-aux", fld_aux, "rank sets by the population's y column");
  fld->add_option("--alpha", fld_alpha, "interval level");
  fld->add_option("--out-prefix", fld_prefix, "output file prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed())
      return cmd_gen_pop(gen_n, gen_dist,
                         gen_has_rho ? std::optional<double>(gen_rho) : std::nullopt,
                         gen_seed, gen_out);
    if (inc->parsed())
      return cmd_inclusion(inc_n, inc_design, inc_k, inc_m, inc_sample, inc_method,
                           inc_reps, inc_seed, inc_out);
    if (smp->parsed())
      return cmd_sample(smp_pop, smp_design, smp_k, smp_m, smp_sample, smp_pattern,
                        smp_ranking, smp_seed, smp_out);
    if (est->parsed())
      return cmd_estimate(est_sample, est_inclusion, est_at, est_median, est_alpha,
                          est_rule, est_assign, est_edf_out, est_report_out);
    if (sim->parsed()) return cmd_simulate(sim_config, sim_out, sim_threads);
    if (ver->parsed())
      return cmd_verify(ver_n_opt->count() ? std::optional<int>(ver_n) : std::nullopt,
                        ver_design_opt->count() ? std::optional<std::string>(ver_design)
                                                : std::nullopt,
                        ver_k, ver_m,
                        ver_x_opt->count() ? std::optional<double>(ver_x) : std::nullopt);
    if (fld->parsed())
      return cmd_field_session(fld_pop, fld_design, fld_k, fld_m, fld_seed, fld_responses,
                               fld_aux, fld_alpha, fld_prefix);
  } catch (const infeasible_design_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const verification_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
