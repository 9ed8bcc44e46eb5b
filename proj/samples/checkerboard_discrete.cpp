// Deep-Discrete-Opt on the 15x15 checkerboard: the model is inverted over
// Bernoulli probabilities and candidates are sampled bit strings.

#include <cstdio>

#include "deepopt/orchestrator.hpp"
#include "deepopt/problems.hpp"

int main(int argc, char** argv) {
  using namespace deepopt;
  const std::uint64_t budget = argc > 1 ? std::stoull(argv[1]) : 30000;
  const CheckerboardProblem problem(15);
  BudgetAccountant accountant(budget);
  Objective objective(problem, accountant, rng_stream(3, Stream::noise));

  DeepOptConfig cfg;  // binary problem: discrete generation is chosen automatically
  const auto result = deepopt_run(objective, cfg, 3, [](const CycleRecord& r) {
    std::printf("cycle %2zu  evals %6llu  batch best %5.0f  inner best %5.0f\n", r.cycle,
                static_cast<unsigned long long>(r.evals_spent), r.batch_best, r.inner_best);
  });

  const auto bits = problem.bits(result.best.solution.view());
  for (std::size_t r = 0; r < problem.side(); ++r) {
    for (std::size_t c = 0; c < problem.side(); ++c) {
      std::putchar(bits[r * problem.side() + c] ? '#' : '.');
    }
    std::putchar('\n');
  }
  std::printf("score %.0f of %d\n", result.best.raw_score, problem.max_score());
  return 0;
}
