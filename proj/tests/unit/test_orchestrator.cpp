#include <gtest/gtest.h>

#include "deepopt/orchestrator.hpp"
#include "deepopt/problems.hpp"
#include "toy_problems.hpp"

using namespace deepopt;

namespace {

// Scaled down so a whole run takes well under a second.
DeepOptConfig small_config() {
  DeepOptConfig cfg;
  cfg.pool_capacity = 1500;
  cfg.y_prime_size = 200;
  cfg.init_seed_points = 50;
  cfg.train.max_epochs = 15;
  cfg.train.validation_size = 20;
  cfg.generator.batch_size = 20;
  cfg.generator.max_iterations = 60;
  cfg.generator.discrete_sample_count = 20;
  cfg.nash.max_evals_per_run = 600;
  cfg.nash.stall_limit = 100;
  cfg.ga.population_size = 20;
  cfg.ga.restart_evals = 600;
  return cfg;
}

EvaluatedSample visit(double score, double gene) { return {Candidate{gene}, score, 0, Source::nash}; }

}  // namespace

TEST(InitializePool, SeedsWithJitteredNeighbours) {
  toy::Bench bench(toy::SumProblem(6), 100000);
  SamplePool pool(5000);
  DeepOptConfig cfg;
  Rng rng(1, 0);
  EvaluatedSample best;
  const auto n = initialize_pool(pool, bench.objective, cfg, rng, nullptr, &best);
  EXPECT_EQ(n, 2000u);
  EXPECT_EQ(pool.size(), 2000u);
  EXPECT_EQ(bench.budget.spent_in(Phase::init), 2000u);
  // Every group of ten is a seed followed by nine neighbours within 0.05.
  for (std::size_t g = 0; g < 200; ++g) {
    const auto& seed = pool[g * 10].solution;
    for (std::size_t k = 1; k < 10; ++k) {
      const auto& nb = pool[g * 10 + k].solution;
      for (std::size_t i = 0; i < 6; ++i) ASSERT_NEAR(nb[i], seed[i], 0.05 + 1e-15);
    }
  }
  EXPECT_DOUBLE_EQ(best.raw_score, pool.best().raw_score);
}

TEST(InitializePool, ShortBudgetWarns) {
  toy::Bench bench(toy::SumProblem(6), 95);
  SamplePool pool(5000);
  Rng rng(2, 0);
  std::vector<std::string> warnings;
  const auto n = initialize_pool(pool, bench.objective, DeepOptConfig{}, rng, &warnings);
  EXPECT_EQ(n, 90u);
  ASSERT_EQ(warnings.size(), 1u);
}

TEST(SelectYPrime, BestAndLastModes) {
  const std::vector<EvaluatedSample> v{visit(3, 0.1), visit(9, 0.2), visit(1, 0.3),
                                       visit(9, 0.4), visit(5, 0.5)};
  auto genes = [](const std::vector<EvaluatedSample>& xs) {
    std::vector<double> g;
    for (const auto& e : xs) g.push_back(e.solution[0]);
    return g;
  };
  // Best three by score, reported in visit order; ties keep visit order.
  EXPECT_EQ(genes(detail::select_y_prime(v, 3, YPrimeMode::best)),
            (std::vector<double>{0.2, 0.4, 0.5}));
  EXPECT_EQ(genes(detail::select_y_prime(v, 2, YPrimeMode::last)),
            (std::vector<double>{0.4, 0.5}));
  EXPECT_EQ(detail::select_y_prime(v, 10, YPrimeMode::best).size(), 5u);
}

TEST(EmbedBinary, CentresBitsAroundHalf) {
  EXPECT_EQ(detail::embed_binary(Candidate{0.0, 1.0}, 0.05).values(),
            (std::vector<double>{0.45, 0.55}));
  EXPECT_EQ(binarize_threshold(detail::embed_binary(Candidate{1.0, 0.0, 1.0}, 0.05)).values(),
            (std::vector<double>{1.0, 0.0, 1.0}));
}

TEST(DeepOpt, BudgetConservation) {
  for (auto inner : {InnerSearch::nash_v1, InnerSearch::nash_v2, InnerSearch::nash_v3}) {
    toy::Bench bench(toy::SumProblem(10), 6000);
    auto cfg = small_config();
    cfg.inner_search = inner;
    const auto res = deepopt_run(bench.objective, cfg, 3);
    EXPECT_EQ(bench.budget.spent(), 6000u);
    std::uint64_t run_evals = 0;
    for (const auto& r : res.runs) run_evals += r.evals;
    const auto& b = bench.budget;
    EXPECT_EQ(b.spent_in(Phase::inner), run_evals);
    EXPECT_EQ(b.spent_in(Phase::init) + b.spent_in(Phase::validation) +
                  b.spent_in(Phase::batch) + b.spent_in(Phase::inner) +
                  b.spent_in(Phase::presample),
              6000u);
    EXPECT_EQ(b.spent_in(Phase::presample), 0u);
    EXPECT_EQ(res.cycles.back().evals_spent, 6000u);
  }
}

TEST(DeepOpt, InnerRunStartsFromBatchMaximum) {
  toy::Bench bench(toy::SumProblem(10), 5000);
  const auto res = deepopt_run(bench.objective, small_config(), 4);
  // A final cycle whose batch hit the empty budget records no run.
  ASSERT_GE(res.runs.size() + 1, res.cycles.size());
  for (std::size_t i = 0; i < res.runs.size(); ++i) {
    EXPECT_EQ(res.runs[i].start_score, res.cycles[i].batch_best);
    EXPECT_GE(res.runs[i].end_score, res.runs[i].start_score);
    EXPECT_GE(res.cycles[i].inner_best, res.cycles[i].batch_best);
  }
}

TEST(DeepOpt, CycleRecordsAreConsistent) {
  toy::Bench bench(toy::SumProblem(10), 5000);
  const auto cfg = small_config();
  const auto res = deepopt_run(bench.objective, cfg, 5);
  ASSERT_FALSE(res.cycles.empty());
  double best = -1e300;
  for (std::size_t i = 0; i < res.cycles.size(); ++i) {
    const auto& c = res.cycles[i];
    EXPECT_EQ(c.cycle, i + 1);
    EXPECT_LE(c.pool_size, cfg.pool_capacity);
    EXPECT_LE(c.pool_min, c.pool_max);
    EXPECT_GE(c.best_so_far, best);
    best = c.best_so_far;
    EXPECT_GE(c.epochs, 1u);
  }
  EXPECT_DOUBLE_EQ(res.best.raw_score, *bench.objective.best_true());
  EXPECT_DOUBLE_EQ(res.best.raw_score, bench.problem.true_score(res.best.solution.view()));
}

TEST(DeepOpt, DeterministicForSeed) {
  auto once = [](std::uint64_t seed) {
    toy::Bench bench(toy::SumProblem(10), 4000);
    return deepopt_run(bench.objective, small_config(), seed);
  };
  const auto a = once(6);
  const auto b = once(6);
  const auto c = once(7);
  EXPECT_EQ(a.best.raw_score, b.best.raw_score);
  EXPECT_TRUE(same_solution(a.best.solution, b.best.solution));
  ASSERT_EQ(a.cycles.size(), b.cycles.size());
  for (std::size_t i = 0; i < a.cycles.size(); ++i) {
    EXPECT_EQ(a.cycles[i].correlation, b.cycles[i].correlation);
    EXPECT_EQ(a.cycles[i].batch_best, b.cycles[i].batch_best);
  }
  EXPECT_NE(a.cycles.front().correlation, c.cycles.front().correlation);
}

TEST(DeepOpt, WithoutModelSkipsTraining) {
  toy::Bench bench(toy::SumProblem(10), 4000);
  auto cfg = small_config();
  cfg.use_model = false;
  const auto res = deepopt_run(bench.objective, cfg, 8);
  EXPECT_EQ(bench.budget.spent_in(Phase::validation), 0u);
  for (const auto& c : res.cycles) EXPECT_EQ(c.epochs, 0u);
  EXPECT_EQ(bench.budget.spent(), 4000u);
}

TEST(DeepOpt, ImprovesOnSines) {
  const SinesProblem sines(20);
  BudgetAccountant budget(8000);
  Objective obj(sines, budget, rng_stream(0, Stream::noise));
  const auto res = deepopt_run(obj, small_config(), 9);
  EXPECT_GT(res.best.raw_score, res.cycles.front().pool_max);
}

TEST(DeepOpt, DiscreteModeOnBinaryProblem) {
  const CheckerboardProblem board(5);
  BudgetAccountant budget(3000);
  Objective obj(board, budget, rng_stream(0, Stream::noise));
  auto cfg = small_config();
  cfg.init_seed_points = 20;
  const auto res = deepopt_run(obj, cfg, 10);
  EXPECT_EQ(budget.spent(), 3000u);
  for (const auto& r : res.runs) {
    // Inner runs start from an embedded bit string.
    for (double g : r.start) EXPECT_TRUE(g == 0.45 || g == 0.55);
  }
  EXPECT_LE(res.best.raw_score, board.max_score());
}

TEST(DeepOptGa, BudgetConservationAndPopulationBatches) {
  toy::Bench bench(toy::SumProblem(10), 5000);
  const auto res = deepopt_ga_run(bench.objective, small_config(), 11);
  EXPECT_EQ(bench.budget.spent(), 5000u);
  std::uint64_t run_evals = 0;
  for (const auto& r : res.runs) run_evals += r.evals;
  EXPECT_EQ(bench.budget.spent_in(Phase::inner), run_evals);
  // Each full cycle evaluates one population-sized batch.
  const auto full = res.cycles.size() - 1;
  EXPECT_GE(bench.budget.spent_in(Phase::batch), full * 20);
  EXPECT_LE(bench.budget.spent_in(Phase::batch), res.cycles.size() * 20);
}

TEST(DeepOpt, RejectsGaInnerSearchAndBadConfig) {
  toy::Bench bench(toy::SumProblem(4), 100);
  auto cfg = small_config();
  cfg.inner_search = InnerSearch::ga;
  EXPECT_THROW(deepopt_run(bench.objective, cfg, 1), Error);
  auto bad = small_config();
  bad.y_prime_size = bad.pool_capacity + 1;
  EXPECT_THROW(bad.validate(), Error);
}
