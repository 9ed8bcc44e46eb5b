#ifndef DEEPOPT_GA_HPP
#define DEEPOPT_GA_HPP

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "deepopt/core.hpp"
#include "deepopt/local_search.hpp"
#include "deepopt/problem.hpp"

namespace deepopt {

struct GaConfig {
  std::size_t population_size = 50;
  double mutation_rate = 0.02;  // per gene
  std::size_t restart_evals = 10000;
  double selection_floor = 1e-6;

  void validate() const {
    if (population_size < 2) throw Error("GaConfig: population_size must be >= 2");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
      throw Error("GaConfig: mutation_rate must lie in [0, 1]");
    }
    if (restart_evals == 0) throw Error("GaConfig: restart_evals must be positive");
  }
};

/// Per-gene fair coin routes a's gene to the first child and b's to the
/// second, or the reverse.
inline std::pair<Candidate, Candidate> uniform_crossover(const Candidate& a, const Candidate& b,
                                                         Rng& rng) {
  if (a.size() != b.size()) throw DimensionError("uniform_crossover: dimension mismatch");
  Candidate c1 = a;
  Candidate c2 = b;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (rng.bernoulli(0.5)) std::swap(c1[i], c2[i]);
  }
  return {std::move(c1), std::move(c2)};
}

/// Each gene is redrawn uniformly with probability `rate`.
inline Candidate mutate(const Candidate& c, double rate, Rng& rng) {
  Candidate out = c;
  if (rate <= 0.0) return out;
  for (auto& g : out) {
    if (rng.bernoulli(rate)) g = rng.uniform();
  }
  return out;
}

struct GaTrace : RunTrace {
  std::vector<double> generation_best;  // max score per generation
  std::size_t generations = 0;
};

namespace detail {

/// Roulette wheel over population-scaled scores with a positive floor.
class RouletteWheel {
 public:
  RouletteWheel(std::span<const double> scores, double floor) {
    const auto scaled = scale_scores(scores);
    cumulative_.reserve(scaled.size());
    double total = 0.0;
    for (double s : scaled) {
      total += std::max(s, floor);
      cumulative_.push_back(total);
    }
  }

  std::size_t spin(Rng& rng) const {
    const double r = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                 cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace detail

/// Generational GA with single-best elitism. The elite is carried without
/// re-evaluation, so each later generation costs population_size - 1
/// evaluations. Stops after restart_evals evaluations or when the budget is
/// spent. `init_scores`, when given, are the already paid-for evaluations of
/// `init_population`.
inline GaTrace ga_run(Objective& objective, const GaConfig& cfg,
                      std::vector<Candidate> init_population, Rng& rng,
                      std::optional<std::vector<double>> init_scores = std::nullopt) {
  cfg.validate();
  if (init_population.size() != cfg.population_size) {
    throw Error("ga_run: initial population size differs from population_size");
  }
  for (const auto& c : init_population) {
    if (c.size() != objective.dimension()) throw DimensionError("ga_run: dimension mismatch");
  }
  if (init_scores && init_scores->size() != init_population.size()) {
    throw Error("ga_run: init_scores size mismatch");
  }
  GaTrace trace;
  TraceRecorder recorder(trace);
  std::vector<Candidate> pop = std::move(init_population);
  std::vector<double> scores;
  if (init_scores) {
    scores = std::move(*init_scores);
  } else {
    if (objective.exhausted()) throw BudgetExhausted();
    for (const auto& c : pop) {
      if (objective.exhausted()) break;
      scores.push_back(objective.evaluate(c, Phase::inner));
      ++trace.evals_used;
    }
    pop.resize(scores.size());
  }
  for (std::size_t i = 0; i < pop.size(); ++i) recorder.record(pop[i], scores[i], Source::ga);

  auto best_index = [&]() {
    return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) -
                                    scores.begin());
  };
  trace.start = pop[best_index()];
  trace.start_score = scores[best_index()];
  trace.generation_best.push_back(trace.start_score);

  while (pop.size() == cfg.population_size && trace.evals_used < cfg.restart_evals &&
         !objective.exhausted()) {
    const std::size_t elite = best_index();
    const detail::RouletteWheel wheel(scores, cfg.selection_floor);
    std::vector<Candidate> next{pop[elite]};
    std::vector<double> next_scores{scores[elite]};
    while (next.size() < cfg.population_size) {
      auto [c1, c2] = uniform_crossover(pop[wheel.spin(rng)], pop[wheel.spin(rng)], rng);
      for (Candidate* child : {&c1, &c2}) {
        if (next.size() == cfg.population_size) break;
        if (objective.exhausted() || trace.evals_used >= cfg.restart_evals) break;
        Candidate m = mutate(*child, cfg.mutation_rate, rng);
        const double s = objective.evaluate(m, Phase::inner);
        ++trace.evals_used;
        recorder.record(m, s, Source::ga);
        next.push_back(std::move(m));
        next_scores.push_back(s);
      }
      if (objective.exhausted() || trace.evals_used >= cfg.restart_evals) break;
    }
    pop = std::move(next);
    scores = std::move(next_scores);
    ++trace.generations;
    trace.generation_best.push_back(scores[best_index()]);
  }
  const std::size_t b = best_index();
  trace.best = {pop[b], scores[b], 0, Source::ga};
  trace.best_history = trace.generation_best;
  return trace;
}

/// Standard GA: uniform random population, restarted every restart_evals
/// evaluations until the budget is spent.
inline RestartResult ga_restarts(Objective& objective, const GaConfig& cfg, Rng& rng) {
  RestartResult result;
  bool have_best = false;
  while (!objective.exhausted()) {
    std::vector<Candidate> pop;
    for (std::size_t i = 0; i < cfg.population_size; ++i) {
      pop.push_back(Candidate::uniform(objective.dimension(), rng));
    }
    GaTrace trace = ga_run(objective, cfg, std::move(pop), rng);
    InnerRunRecord rec;
    rec.run_index = result.runs.size() + 1;
    rec.start = trace.start;
    rec.end = trace.best.solution;
    rec.start_score = trace.start_score;
    rec.end_score = trace.best.raw_score;
    rec.evals = trace.evals_used;
    result.runs.push_back(std::move(rec));
    if (!have_best || trace.best.raw_score > result.best.raw_score) {
      result.best = trace.best;
      have_best = true;
    }
  }
  return result;
}

}  // namespace deepopt

#endif  // DEEPOPT_GA_HPP
