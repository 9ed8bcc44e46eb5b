#ifndef DEEPOPT_LOCAL_SEARCH_HPP
#define DEEPOPT_LOCAL_SEARCH_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "deepopt/core.hpp"
#include "deepopt/problem.hpp"

namespace deepopt {

enum class NashVariant { v1, v2, v3 };

inline std::string_view to_string(NashVariant v) {
  switch (v) {
    case NashVariant::v1: return "nash-v1";
    case NashVariant::v2: return "nash-v2";
    case NashVariant::v3: return "nash-v3";
  }
  return "unknown";
}

struct NashConfig {
  double perturbation_fraction = 0.02;  // m
  double mutation_relative_range = 0.25;
  double zero_floor = 0.02;
  std::size_t max_evals_per_run = 10000;
  std::size_t stall_limit = 500;
  NashVariant variant = NashVariant::v1;
  std::size_t presample_count = 50;  // M, for V2/V3
  double v3_perturbation_scale = 0.05;

  void validate() const {
    if (!(perturbation_fraction > 0.0 && perturbation_fraction <= 1.0)) {
      throw Error("NashConfig: perturbation_fraction must lie in (0, 1]");
    }
    if (!(mutation_relative_range > 0.0)) {
      throw Error("NashConfig: mutation_relative_range must be positive");
    }
    if (stall_limit >= max_evals_per_run) {
      throw Error("NashConfig: stall_limit must be below max_evals_per_run");
    }
  }
};

/// Unique samples visited by one local search run, in evaluation order.
struct RunTrace {
  std::vector<EvaluatedSample> visited;
  EvaluatedSample best;
  Candidate start;
  double start_score = 0.0;
  std::uint64_t evals_used = 0;
  std::vector<double> best_history;  // best score after each accepted step
};

/// Records unique samples for a trace.
class TraceRecorder {
 public:
  explicit TraceRecorder(RunTrace& trace) : trace_(&trace) {}

  void record(const Candidate& c, double score, Source source) {
    const std::uint64_t h = solution_hash(c);
    auto lookup = [this](std::size_t i) -> const Candidate& {
      return trace_->visited[i].solution;
    };
    if (index_.find(c, h, lookup) != nullptr) return;
    index_.add(h, trace_->visited.size());
    trace_->visited.push_back({c, score, 0, source});
  }

 private:
  RunTrace* trace_;
  DedupIndex<std::size_t> index_;
};

/// Multiplicative perturbation of 1..round(m·|c|) randomly chosen genes (with
/// replacement). A gene p moves to Uniform[(1-r)p, (1+r)p]; an exact zero
/// moves to Uniform[0, zero_floor]. Results are clipped to [0, 1].
inline Candidate perturb(const Candidate& c, const NashConfig& cfg, Rng& rng) {
  Candidate out = c;
  if (c.empty()) return out;
  const auto upper = std::max<std::int64_t>(
      1, std::llround(cfg.perturbation_fraction * static_cast<double>(c.size())));
  const std::int64_t count = rng.uniform_int(1, upper);
  for (std::int64_t i = 0; i < count; ++i) {
    const std::size_t pos = rng.index(c.size());
    const double p = out[pos];
    const double r = cfg.mutation_relative_range;
    out[pos] = p == 0.0 ? rng.uniform(0.0, cfg.zero_floor)
                        : clip01(rng.uniform((1.0 - r) * p, (1.0 + r) * p));
  }
  return out;
}

/// Next-ascent stochastic hillclimbing from `init`. A candidate is accepted
/// when its score is >= the current best. Stops on the per-run evaluation cap,
/// after stall_limit consecutive rejections, or when the budget runs out.
/// `init_score` skips re-evaluating an already scored start.
inline RunTrace nash_run(const Candidate& init, Objective& objective,
                         const NashConfig& cfg, Rng& rng,
                         std::optional<double> init_score = std::nullopt) {
  cfg.validate();
  if (init.size() != objective.dimension()) {
    throw DimensionError("nash_run: init dimension mismatch");
  }
  RunTrace trace;
  TraceRecorder recorder(trace);
  trace.start = init;
  double best_score;
  if (init_score) {
    best_score = *init_score;
  } else {
    if (objective.exhausted()) throw BudgetExhausted();
    best_score = objective.evaluate(init, Phase::inner);
    ++trace.evals_used;
  }
  trace.start_score = best_score;
  recorder.record(init, best_score, Source::nash);
  Candidate current = init;
  std::size_t stall = 0;
  trace.best_history.push_back(best_score);
  while (trace.evals_used < cfg.max_evals_per_run && stall < cfg.stall_limit &&
         !objective.exhausted()) {
    Candidate cand = perturb(current, cfg, rng);
    const double score = objective.evaluate(cand, Phase::inner);
    ++trace.evals_used;
    recorder.record(cand, score, Source::nash);
    if (score >= best_score) {
      best_score = score;
      current = std::move(cand);
      stall = 0;
      trace.best_history.push_back(best_score);
    } else {
      ++stall;
    }
  }
  trace.best = {current, best_score, 0, Source::nash};
  return trace;
}

struct NashStart {
  Candidate solution;
  std::optional<double> score;  // set when the start was evaluated already
};

/// Start point for a NASH run. V1: uniform random. V2: best of M uniform
/// samples. V3: best of M jittered copies of `best_so_far` (V1 when absent).
inline NashStart nash_init(NashVariant variant, const std::optional<Candidate>& best_so_far,
                           Objective& objective, const NashConfig& cfg, Rng& rng) {
  const std::size_t dim = objective.dimension();
  if (variant == NashVariant::v1 || (variant == NashVariant::v3 && !best_so_far)) {
    return {Candidate::uniform(dim, rng), std::nullopt};
  }
  std::optional<NashStart> best;
  for (std::size_t i = 0; i < cfg.presample_count && !objective.exhausted(); ++i) {
    Candidate c(dim);
    if (variant == NashVariant::v2) {
      c = Candidate::uniform(dim, rng);
    } else {
      c = *best_so_far;
      for (auto& g : c) {
        g = clip01(g + rng.uniform(-cfg.v3_perturbation_scale, cfg.v3_perturbation_scale));
      }
    }
    const double s = objective.evaluate(c, Phase::presample);
    if (!best || s > *best->score) best = NashStart{std::move(c), s};
  }
  if (!best) return {Candidate::uniform(dim, rng), std::nullopt};
  return *best;
}

/// Start/end record of one inner search run.
struct InnerRunRecord {
  std::size_t run_index = 0;  // 1-based
  Candidate start;
  Candidate end;
  double start_score = 0.0;
  double end_score = 0.0;
  std::uint64_t evals = 0;
};

struct RestartResult {
  EvaluatedSample best;
  std::vector<InnerRunRecord> runs;
};

/// Repeated NASH runs of one variant until the budget is spent. V3 jitters
/// around the best solution of all previous runs.
inline RestartResult nash_restarts(Objective& objective, const NashConfig& cfg, Rng& rng) {
  RestartResult result;
  std::optional<Candidate> best_so_far;
  bool have_best = false;
  while (!objective.exhausted()) {
    NashStart start = nash_init(cfg.variant, best_so_far, objective, cfg, rng);
    if (objective.exhausted() && !start.score) break;
    RunTrace trace = nash_run(start.solution, objective, cfg, rng, start.score);
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
      best_so_far = trace.best.solution;
      have_best = true;
    }
  }
  return result;
}

}  // namespace deepopt

#endif  // DEEPOPT_LOCAL_SEARCH_HPP
