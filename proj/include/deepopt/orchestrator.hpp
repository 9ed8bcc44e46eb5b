#ifndef DEEPOPT_ORCHESTRATOR_HPP
#define DEEPOPT_ORCHESTRATOR_HPP

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "deepopt/core.hpp"
#include "deepopt/ga.hpp"
#include "deepopt/generator.hpp"
#include "deepopt/local_search.hpp"
#include "deepopt/network.hpp"
#include "deepopt/problem.hpp"
#include "deepopt/trainer.hpp"

namespace deepopt {

enum class InnerSearch { nash_v1, nash_v2, nash_v3, ga };
enum class YPrimeMode { best, last };
enum class GenerationMode { automatic, continuous, discrete };

inline std::string_view to_string(InnerSearch s) {
  switch (s) {
    case InnerSearch::nash_v1: return "nash-v1";
    case InnerSearch::nash_v2: return "nash-v2";
    case InnerSearch::nash_v3: return "nash-v3";
    case InnerSearch::ga: return "ga";
  }
  return "unknown";
}

struct DeepOptConfig {
  // nash-v2 seeds each generated batch uniformly (the "wrapped NASH-2" setup);
  // the other NASH variants seed it around the best solution so far.
  InnerSearch inner_search = InnerSearch::nash_v3;
  Architecture architecture = Architecture::deep5;
  std::size_t pool_capacity = 10000;
  std::size_t y_prime_size = 1000;
  YPrimeMode y_prime_mode = YPrimeMode::best;
  GenerationMode generation = GenerationMode::automatic;
  bool use_model = true;  // false replaces the model batch with uniform samples
  std::size_t init_seed_points = 200;
  std::size_t neighbors_per_seed = 9;
  double init_perturbation = 0.05;
  // Discrete mode embeds a binary start at 0.5 +/- this offset so the
  // multiplicative NASH perturbation can still flip bits.
  double discrete_nash_offset = 0.05;
  GeneratorConfig generator{};
  ScalingConfig scaling{};
  TrainConfig train{};
  NashConfig nash{};
  GaConfig ga{};

  void validate() const {
    if (y_prime_size > pool_capacity) {
      throw Error("DeepOptConfig: y_prime_size exceeds pool_capacity");
    }
    generator.validate();
    scaling.validate();
    train.validate();
    nash.validate();
    if (inner_search == InnerSearch::ga) ga.validate();
  }
};

/// One outer-loop iteration as seen by reports.
struct CycleRecord {
  std::size_t cycle = 0;  // 1-based
  std::size_t pool_size = 0;
  double pool_min = 0.0;  // pool used for training this cycle
  double pool_max = 0.0;
  double pool_mean = 0.0;
  std::size_t epochs = 0;
  std::size_t restarts = 0;
  StopReason stop_reason = StopReason::max_epochs;
  double correlation = 0.0;
  std::vector<double> correlations;
  double batch_best = 0.0;
  double predicted_before = 0.0;  // batch mean over back-driven members
  double predicted_after = 0.0;
  // Observed mean score of the back-driven members and of the untouched ones;
  // their difference is what inversion bought this cycle.
  double backdriven_mean = 0.0;
  double untouched_mean = 0.0;
  double inner_best = 0.0;
  double best_so_far = 0.0;  // observed score
  std::uint64_t evals_spent = 0;
};

struct DeepOptResult {
  EvaluatedSample best;  // highest observed score
  std::vector<CycleRecord> cycles;
  std::vector<InnerRunRecord> runs;
  std::size_t init_samples = 0;
  std::vector<std::string> warnings;
};

using CycleCallback = std::function<void(const CycleRecord&)>;

/// Seed points drawn uniformly, each followed by jittered neighbours, all
/// evaluated and inserted. With too little budget fewer seeds are used.
inline std::size_t initialize_pool(SamplePool& pool, Objective& objective,
                                   const DeepOptConfig& cfg, Rng& rng,
                                   std::vector<std::string>* warnings = nullptr,
                                   EvaluatedSample* best = nullptr) {
  const std::size_t group = 1 + cfg.neighbors_per_seed;
  std::size_t seeds = cfg.init_seed_points;
  const auto remaining = objective.budget().remaining();
  if (remaining < seeds * group) {
    seeds = std::max<std::size_t>(1, static_cast<std::size_t>(remaining / group));
    if (warnings) {
      warnings->push_back("initialize_pool: budget allows only " + std::to_string(seeds) +
                          " seed points");
    }
  }
  std::vector<EvaluatedSample> batch;
  const std::size_t dim = objective.dimension();
  for (std::size_t s = 0; s < seeds && !objective.exhausted(); ++s) {
    const Candidate seed = Candidate::uniform(dim, rng);
    for (std::size_t n = 0; n < group && !objective.exhausted(); ++n) {
      Candidate c = seed;
      if (n > 0) {
        for (auto& g : c) {
          g = clip01(g + rng.uniform(-cfg.init_perturbation, cfg.init_perturbation));
        }
      }
      const double score = objective.evaluate(c, Phase::init);
      if (best && (best->solution.empty() || score > best->raw_score)) {
        *best = {c, score, 0, Source::random_init};
      }
      batch.push_back({std::move(c), score, 0, Source::random_init});
    }
  }
  pool.insert(batch);
  return batch.size();
}

namespace detail {

/// Y' from a run's unique visits: the best k by score (ties keep visit order)
/// or the last k visited.
inline std::vector<EvaluatedSample> select_y_prime(const std::vector<EvaluatedSample>& visited,
                                                   std::size_t k, YPrimeMode mode) {
  if (visited.size() <= k) return visited;
  if (mode == YPrimeMode::last) {
    return {visited.end() - static_cast<std::ptrdiff_t>(k), visited.end()};
  }
  std::vector<std::size_t> order(visited.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return visited[a].raw_score > visited[b].raw_score;
  });
  order.resize(k);
  std::sort(order.begin(), order.end());
  std::vector<EvaluatedSample> out;
  out.reserve(k);
  for (auto i : order) out.push_back(visited[i]);
  return out;
}

inline bool use_discrete(const DeepOptConfig& cfg, const Problem& problem) {
  switch (cfg.generation) {
    case GenerationMode::discrete: return true;
    case GenerationMode::continuous: return false;
    case GenerationMode::automatic: return problem.binary();
  }
  return false;
}

inline Candidate embed_binary(const Candidate& bits, double offset) {
  Candidate out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    out[i] = bits[i] > 0.5 ? 0.5 + offset : 0.5 - offset;
  }
  return out;
}

/// State shared by the NASH- and GA-wrapped outer loops.
class OuterLoop {
 public:
  OuterLoop(Objective& objective, const DeepOptConfig& cfg, std::uint64_t seed)
      : objective_(objective),
        cfg_(cfg),
        discrete_(use_discrete(cfg, objective.problem())),
        view_(discrete_ ? InputView::binary : InputView::raw),
        pool_(cfg.pool_capacity),
        init_rng_(rng_stream(seed, Stream::init)),
        gen_rng_(rng_stream(seed, Stream::generate)),
        search_rng_(rng_stream(seed, Stream::nash)),
        trainer_(NetworkSpec::of(cfg.architecture, objective.dimension()), cfg.train,
                 rng_stream(seed, Stream::model_train)) {
    cfg_.validate();
  }

  DeepOptResult& result() { return result_; }
  const SamplePool& pool() const { return pool_; }
  bool discrete() const { return discrete_; }
  Rng& search_rng() { return search_rng_; }
  GeneratorConfig& generator_config() { return cfg_.generator; }

  void initialize() {
    result_.init_samples =
        initialize_pool(pool_, objective_, cfg_, init_rng_, &result_.warnings, &result_.best);
  }

  /// Train on the pool and fill in the pool/training fields of `rec`.
  void train(CycleRecord& rec) {
    rec.pool_size = pool_.size();
    std::tie(rec.pool_min, rec.pool_max) = pool_.extremes();
    rec.pool_mean = pool_.mean_score();
    if (!cfg_.use_model) return;
    const TrainReport report =
        trainer_.train_cycle(pool_, cfg_.scaling, result_.best, objective_, view_);
    rec.epochs = report.epochs;
    rec.restarts = report.restarts;
    rec.stop_reason = report.stop_reason;
    rec.correlation = report.final_correlation;
    rec.correlations = report.correlations;
  }

  /// Generate and evaluate a batch; returns the evaluated members (possibly
  /// fewer than requested when the budget runs out).
  std::vector<EvaluatedSample> generate(CycleRecord& rec) {
    const std::size_t dim = objective_.dimension();
    std::optional<Candidate> center;
    if (cfg_.inner_search != InnerSearch::nash_v2) center = result_.best.solution;
    GeneratedBatch batch;
    if (!cfg_.use_model) {
      for (std::size_t i = 0; i < cfg_.generator.batch_size; ++i) {
        batch.members.push_back(Candidate::uniform(dim, gen_rng_));
        if (discrete_) batch.members.back() = binarize_threshold(batch.members.back());
      }
    } else if (discrete_) {
      batch = generate_discrete_batch(trainer_.model(), center, cfg_.generator, gen_rng_);
    } else {
      batch = generate_batch(trainer_.model(), center, cfg_.generator, gen_rng_);
    }
    auto mean = [](const std::vector<double>& v) {
      return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    rec.predicted_before = mean(batch.predicted_before);
    rec.predicted_after = mean(batch.predicted_after);
    std::vector<EvaluatedSample> out;
    double sums[2] = {0.0, 0.0};
    std::size_t counts[2] = {0, 0};
    for (std::size_t i = 0; i < batch.members.size(); ++i) {
      if (objective_.exhausted()) break;
      const double s = objective_.evaluate(batch.members[i], Phase::batch);
      const int k = i < batch.backdriven.size() && batch.backdriven[i] ? 1 : 0;
      sums[k] += s;
      ++counts[k];
      out.push_back({std::move(batch.members[i]), s, 0, Source::generated});
      note(out.back());
    }
    if (counts[0] > 0) rec.untouched_mean = sums[0] / static_cast<double>(counts[0]);
    if (counts[1] > 0) rec.backdriven_mean = sums[1] / static_cast<double>(counts[1]);
    if (!out.empty()) {
      rec.batch_best = std::max_element(out.begin(), out.end(), [](const auto& a, const auto& b) {
                         return a.raw_score < b.raw_score;
                       })->raw_score;
    }
    return out;
  }

  /// Y' of a trace plus the batch go into the pool.
  void absorb(const RunTrace& trace, const std::vector<EvaluatedSample>& batch) {
    std::vector<EvaluatedSample> y;
    if (discrete_) {
      // Many real-valued visits share one bit string; select among the
      // distinct strings.
      RunTrace bits;
      TraceRecorder recorder(bits);
      for (const auto& e : trace.visited) {
        recorder.record(binarize_threshold(e.solution), e.raw_score, e.source);
      }
      y = select_y_prime(bits.visited, cfg_.y_prime_size, cfg_.y_prime_mode);
    } else {
      y = select_y_prime(trace.visited, cfg_.y_prime_size, cfg_.y_prime_mode);
    }
    std::vector<EvaluatedSample> insert = batch;
    insert.insert(insert.end(), y.begin(), y.end());
    pool_.insert(insert);
    note(trace.best);
  }

  void record_run(const RunTrace& trace) {
    InnerRunRecord rec;
    rec.run_index = result_.runs.size() + 1;
    rec.start = trace.start;
    rec.end = trace.best.solution;
    rec.start_score = trace.start_score;
    rec.end_score = trace.best.raw_score;
    rec.evals = trace.evals_used;
    result_.runs.push_back(std::move(rec));
  }

  void finish(CycleRecord& rec, const CycleCallback& on_cycle) {
    rec.cycle = result_.cycles.size() + 1;
    rec.best_so_far = result_.best.raw_score;
    rec.evals_spent = objective_.budget().spent();
    result_.cycles.push_back(rec);
    if (on_cycle) on_cycle(result_.cycles.back());
  }

  void note(const EvaluatedSample& s) {
    if (result_.best.solution.empty() || s.raw_score > result_.best.raw_score) {
      result_.best = s;
    }
  }

  Objective& objective() { return objective_; }
  const DeepOptConfig& config() const { return cfg_; }

 private:
  Objective& objective_;
  DeepOptConfig cfg_;
  bool discrete_;
  InputView view_;
  SamplePool pool_;
  Rng init_rng_;
  Rng gen_rng_;
  Rng search_rng_;
  ModelTrainer trainer_;
  DeepOptResult result_;
};

inline std::size_t best_index(const std::vector<EvaluatedSample>& xs) {
  return static_cast<std::size_t>(
      std::max_element(xs.begin(), xs.end(),
                       [](const auto& a, const auto& b) { return a.raw_score < b.raw_score; }) -
      xs.begin());
}

}  // namespace detail

/// Deep-Opt wrapping NASH: train, generate, evaluate the batch, hillclimb
/// from its best member, feed Y' and the batch back into the pool. Runs until
/// the budget is spent.
inline DeepOptResult deepopt_run(Objective& objective, const DeepOptConfig& cfg,
                                 std::uint64_t seed, const CycleCallback& on_cycle = {}) {
  if (cfg.inner_search == InnerSearch::ga) {
    throw Error("deepopt_run: use deepopt_ga_run for the GA inner search");
  }
  detail::OuterLoop loop(objective, cfg, seed);
  loop.initialize();
  while (!objective.exhausted()) {
    CycleRecord rec;
    loop.train(rec);
    const auto batch = loop.generate(rec);
    if (batch.empty()) {
      loop.finish(rec, on_cycle);
      break;
    }
    const auto& m = batch[detail::best_index(batch)];
    Candidate start = m.solution;
    if (loop.discrete()) start = detail::embed_binary(start, cfg.discrete_nash_offset);
    RunTrace trace;
    if (objective.exhausted()) {
      trace.start = start;
      trace.start_score = m.raw_score;
      trace.best = m;
      trace.visited.push_back(m);
    } else {
      trace = nash_run(start, objective, cfg.nash, loop.search_rng(), m.raw_score);
    }
    rec.inner_best = trace.best.raw_score;
    loop.record_run(trace);
    loop.absorb(trace, batch);
    loop.finish(rec, on_cycle);
  }
  return std::move(loop.result());
}

/// Deep-Opt-GA: every GA restart starts from a model-generated population of
/// population_size members.
inline DeepOptResult deepopt_ga_run(Objective& objective, DeepOptConfig cfg, std::uint64_t seed,
                                    const CycleCallback& on_cycle = {}) {
  cfg.inner_search = InnerSearch::ga;
  cfg.generator.batch_size = cfg.ga.population_size;
  detail::OuterLoop loop(objective, cfg, seed);
  loop.initialize();
  while (!objective.exhausted()) {
    CycleRecord rec;
    loop.train(rec);
    auto batch = loop.generate(rec);
    if (batch.empty()) {
      loop.finish(rec, on_cycle);
      break;
    }
    RunTrace trace;
    if (batch.size() < cfg.ga.population_size || objective.exhausted()) {
      const auto& m = batch[detail::best_index(batch)];
      trace.start = m.solution;
      trace.start_score = m.raw_score;
      trace.best = m;
    } else {
      std::vector<Candidate> pop;
      std::vector<double> scores;
      for (const auto& e : batch) {
        pop.push_back(e.solution);
        scores.push_back(e.raw_score);
      }
      trace = ga_run(objective, cfg.ga, std::move(pop), loop.search_rng(), std::move(scores));
    }
    rec.inner_best = trace.best.raw_score;
    loop.record_run(trace);
    loop.absorb(trace, batch);
    loop.finish(rec, on_cycle);
  }
  return std::move(loop.result());
}

}  // namespace deepopt

#endif  // DEEPOPT_ORCHESTRATOR_HPP
