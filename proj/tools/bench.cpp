// Benchmarks the OpenMP kernels against their serial reference paths and
// verifies that both produce identical bits.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "rss/estimators.hpp"
#include "rss/inclusion.hpp"
#include "rss/population.hpp"
#include "rss/simulation.hpp"

using namespace rss;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

struct Case {
  std::string name;
  std::function<std::vector<double>(Exec)> run;
};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
  return worst;
}

}  // namespace

int main() {
  std::vector<Case> cases;

  cases.push_back({"level2 table N=224 k=3 m=7", [](Exec exec) {
    const auto spec = DesignSpec::balanced(Design::Level2, 3, 7);
    return level2_inclusion(spec, 224, exec).second;
  }});

  cases.push_back({"level0 table N=200 k=4 m=10", [](Exec exec) {
    const auto spec = DesignSpec::balanced(Design::Level0, 4, 10);
    return level0_inclusion(spec, 200, exec).second;
  }});

  cases.push_back({"level1 exact N=100 k=3 m=4", [](Exec exec) {
    const auto spec = DesignSpec::balanced(Design::Level1, 3, 4);
    return level1_inclusion(spec, 100, 300'000'000, exec).second;
  }});

  cases.push_back({"true variance N=224 (9 points)", [](Exec exec) {
    const Population pop = Population::grid(224, DistributionKind::StandardNormal);
    const auto table = level2_inclusion(DesignSpec::balanced(Design::Level2, 3, 7), 224);
    std::vector<double> out;
    for (int d = 1; d <= 9; ++d)
      out.push_back(true_variance(pop, table, pop.quantile_value(d / 10.0), exec));
    return out;
  }});

  cases.push_back({"mc inclusion l2 N=50 k=5 1e5 reps", [](Exec exec) {
    const auto spec = DesignSpec::balanced(Design::Level2, 5, 2);
    return mc_inclusion(50, spec, 100000, 7, exec).first;
  }});

  cases.push_back({"imperfect RE N=100 m=4 k=5 2000 reps", [](Exec exec) {
    SimulationConfig cfg;
    cfg.population_size = 100;
    cfg.set_size = 5;
    cfg.cycles = 4;
    cfg.rho = 0.9;
    cfg.reps = 2000;
    cfg.master_seed = 42;
    const REResult res = run_imperfect_re(cfg, exec);
    std::vector<double> out;
    for (const auto& row : res.rows) out.push_back(row.re);
    return out;
  }});

  std::printf("%-38s %12s %12s %9s %10s\n", "kernel", "serial ms", "openmp ms", "speedup",
              "max |diff|");
  for (const auto& c : cases) {
    const double t0 = now_ms();
    const std::vector<double> serial = c.run(Exec::Serial);
    const double t1 = now_ms();
    const std::vector<double> parallel = c.run(Exec::Parallel);
    const double t2 = now_ms();
    std::printf("%-38s %12.1f %12.1f %8.2fx %10.2e\n", c.name.c_str(), t1 - t0, t2 - t1,
                (t1 - t0) / std::max(1e-9, t2 - t1), max_abs_diff(serial, parallel));
  }
  std::printf("(threads available: %d)\n", max_threads());
  return 0;
}
