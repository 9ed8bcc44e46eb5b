// Deep-Opt against plain NASH on the Sines problem. Prints the pool's score
// range per cycle and how many genes of each inner-run start already sit near
// the 1-D optimum.

#include <cmath>
#include <cstdio>

#include "deepopt/oracle.hpp"
#include "deepopt/orchestrator.hpp"
#include "deepopt/problems.hpp"

namespace {

double near_optimum_fraction(const deepopt::Candidate& c, double optimum) {
  std::size_t near = 0;
  for (double g : c) near += std::fabs(100.0 * g - optimum) <= 5.0 ? 1 : 0;
  return static_cast<double>(near) / static_cast<double>(c.size());
}

}  // namespace

int main() {
  using namespace deepopt;
  const SinesProblem problem(50);
  const double optimum = oracle::sines_1d_optimum().location;
  const std::uint64_t budget = 60000;

  BudgetAccountant deep_budget(budget);
  Objective deep(problem, deep_budget, rng_stream(1, Stream::noise));
  DeepOptConfig cfg;
  const auto result = deepopt_run(deep, cfg, 1, [](const CycleRecord& r) {
    std::printf("cycle %2zu  pool [%9.1f, %9.1f]  corr %+.3f  best %.1f\n", r.cycle,
                r.pool_min, r.pool_max, r.correlation, r.best_so_far);
  });

  BudgetAccountant nash_budget(budget);
  Objective plain(problem, nash_budget, rng_stream(1, Stream::noise));
  Rng rng = rng_stream(1, Stream::nash);
  const auto nash = nash_restarts(plain, NashConfig{}, rng);

  std::printf("\nrun  deep-opt start  nash-v1 start   (fraction of genes within 5 of %.3f)\n",
              optimum);
  for (std::size_t i = 0; i < std::min(result.runs.size(), nash.runs.size()); ++i) {
    std::printf("%3zu  %14.2f  %13.2f\n", i + 1,
                near_optimum_fraction(result.runs[i].start, optimum),
                near_optimum_fraction(nash.runs[i].start, optimum));
  }
  std::printf("\nbest: deep-opt %.2f, nash-v1 %.2f, optimum %.2f\n", result.best.raw_score,
              nash.best.raw_score, 50.0 * oracle::sines_1d_optimum().value);
  return 0;
}
