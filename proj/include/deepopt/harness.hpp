#ifndef DEEPOPT_HARNESS_HPP
#define DEEPOPT_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "deepopt/core.hpp"
#include "deepopt/ga.hpp"
#include "deepopt/local_search.hpp"
#include "deepopt/orchestrator.hpp"
#include "deepopt/problems.hpp"
#include "deepopt/stats.hpp"

namespace deepopt {

class UsageError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Algorithms
// ---------------------------------------------------------------------------

enum class AlgorithmKind {
  nash1,
  nash2,
  nash3,
  ga,
  deep_opt_5,
  deep_opt_10,
  deep_opt_5_real,
  deep_opt_10_real,
  deep_opt_ga,
};

inline constexpr std::array<std::pair<AlgorithmKind, std::string_view>, 9> kAlgorithmNames{{
    {AlgorithmKind::nash1, "nash-1"},
    {AlgorithmKind::nash2, "nash-2"},
    {AlgorithmKind::nash3, "nash-3"},
    {AlgorithmKind::ga, "ga"},
    {AlgorithmKind::deep_opt_5, "deep-opt-5"},
    {AlgorithmKind::deep_opt_10, "deep-opt-10"},
    {AlgorithmKind::deep_opt_5_real, "deep-opt-5-real"},
    {AlgorithmKind::deep_opt_10_real, "deep-opt-10-real"},
    {AlgorithmKind::deep_opt_ga, "deep-opt-ga"},
}};

inline std::optional<AlgorithmKind> parse_algorithm(std::string_view name) {
  for (const auto& [k, n] : kAlgorithmNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

inline std::string_view to_string(AlgorithmKind k) {
  for (const auto& [kind, n] : kAlgorithmNames) {
    if (kind == k) return n;
  }
  return "unknown";
}

inline std::string algorithm_list() {
  std::string out;
  for (const auto& [k, n] : kAlgorithmNames) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiment specification
// ---------------------------------------------------------------------------

struct ExperimentSpec {
  ProblemKind problem = ProblemKind::sines;
  std::vector<std::string> algorithms;
  std::size_t instances = 20;
  std::size_t trials = 1;
  std::uint64_t budget = 500000;
  std::uint64_t seed = 0;
  std::string out_dir;
  Architecture architecture = Architecture::deep5;  // for deep-opt-ga
  InstanceOptions instance_options{};
  DeepOptConfig deepopt{};
  NashConfig nash{};
  GaConfig ga{};
  bool timing = false;  // wall_ms is 0 unless set, keeping reruns byte-identical
  bool traces = true;
  bool history = true;
  std::vector<std::size_t> snapshot_runs{1, 10, 25};
  std::size_t jobs = 1;  // worker threads; results do not depend on it

  void validate() const {
    if (algorithms.empty()) throw UsageError("at least one algorithm is required");
    for (const auto& a : algorithms) {
      if (!parse_algorithm(a)) {
        throw UsageError("unknown algorithm '" + a + "' (known: " + algorithm_list() + ")");
      }
    }
    if (instances == 0) throw UsageError("instances must be >= 1");
    if (trials == 0) throw UsageError("trials must be >= 1");
    if (budget == 0) throw UsageError("budget must be >= 1");
    if (jobs == 0) throw UsageError("jobs must be >= 1");
  }
};

/// Scale presets. `desk` trims budgets and instance counts so a comparison
/// finishes on one core in minutes; `paper` uses the published scale.
inline void apply_preset(ExperimentSpec& spec, std::string_view preset) {
  if (preset == "paper") {
    spec.budget = 500000;
    spec.instances = 20;
  } else if (preset == "desk") {
    spec.budget = 100000;
    spec.instances = 5;
  } else {
    throw UsageError("unknown preset '" + std::string(preset) + "' (paper, desk)");
  }
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(root) ^ a) ^ b);
}

/// Instance i of an experiment. Shared by every algorithm.
inline std::uint64_t instance_seed(std::uint64_t root, std::size_t i) {
  return derive_seed(root, 1, i);
}

/// Trial t on an instance. Shared by every algorithm (common random numbers).
inline std::uint64_t trial_seed(std::uint64_t inst_seed, std::size_t t) {
  return derive_seed(inst_seed, 2, t);
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

struct TrialResult {
  std::string problem;
  std::uint64_t instance_seed = 0;
  std::string algorithm;
  std::size_t trial = 0;
  double best_score = 0.0;  // noiseless for noisy problems
  std::uint64_t evals_used = 0;
  std::int64_t wall_ms = 0;
  std::array<std::uint64_t, kPhaseCount> per_phase{};
  std::vector<Objective::TracePoint> trace;
  std::vector<CycleRecord> cycles;
  std::vector<InnerRunRecord> runs;
  std::vector<std::string> warnings;
};

inline DeepOptConfig deepopt_config_for(AlgorithmKind kind, const ExperimentSpec& spec) {
  DeepOptConfig cfg = spec.deepopt;
  cfg.nash = spec.nash;
  cfg.ga = spec.ga;
  switch (kind) {
    case AlgorithmKind::deep_opt_5:
    case AlgorithmKind::deep_opt_5_real:
      cfg.architecture = Architecture::deep5;
      break;
    case AlgorithmKind::deep_opt_10:
    case AlgorithmKind::deep_opt_10_real:
      cfg.architecture = Architecture::deep10;
      break;
    default:
      cfg.architecture = spec.architecture;
      break;
  }
  if (kind == AlgorithmKind::deep_opt_5_real || kind == AlgorithmKind::deep_opt_10_real) {
    cfg.generation = GenerationMode::continuous;
  }
  return cfg;
}

/// One (algorithm, instance, trial) run under a fresh budget.
inline TrialResult run_trial(const ProblemInstance& instance, AlgorithmKind kind,
                             const ExperimentSpec& spec, std::size_t trial) {
  TrialResult r;
  r.problem = std::string(to_string(instance.kind));
  r.instance_seed = instance.instance_seed;
  r.algorithm = std::string(to_string(kind));
  r.trial = trial;
  const std::uint64_t seed = trial_seed(instance.instance_seed, trial);
  BudgetAccountant budget(spec.budget);
  Objective objective(*instance.problem, budget, rng_stream(seed, Stream::noise));
  objective.set_record_trace(spec.traces);
  const auto t0 = std::chrono::steady_clock::now();
  switch (kind) {
    case AlgorithmKind::nash1:
    case AlgorithmKind::nash2:
    case AlgorithmKind::nash3: {
      NashConfig cfg = spec.nash;
      cfg.variant = kind == AlgorithmKind::nash1   ? NashVariant::v1
                    : kind == AlgorithmKind::nash2 ? NashVariant::v2
                                                   : NashVariant::v3;
      Rng rng = rng_stream(seed, Stream::nash);
      r.runs = nash_restarts(objective, cfg, rng).runs;
      break;
    }
    case AlgorithmKind::ga: {
      Rng rng = rng_stream(seed, Stream::ga);
      r.runs = ga_restarts(objective, spec.ga, rng).runs;
      break;
    }
    case AlgorithmKind::deep_opt_ga: {
      auto res = deepopt_ga_run(objective, deepopt_config_for(kind, spec), seed);
      r.cycles = std::move(res.cycles);
      r.runs = std::move(res.runs);
      r.warnings = std::move(res.warnings);
      break;
    }
    default: {
      auto res = deepopt_run(objective, deepopt_config_for(kind, spec), seed);
      r.cycles = std::move(res.cycles);
      r.runs = std::move(res.runs);
      r.warnings = std::move(res.warnings);
      break;
    }
  }
  if (spec.timing) {
    r.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  }
  r.best_score = objective.best_true().value_or(0.0);
  r.evals_used = budget.spent();
  r.per_phase = budget.per_phase();
  r.trace = objective.trace();
  // Keep only the requested start/end snapshots.
  std::vector<InnerRunRecord> kept;
  for (auto& run : r.runs) {
    if (std::find(spec.snapshot_runs.begin(), spec.snapshot_runs.end(), run.run_index) !=
        spec.snapshot_runs.end()) {
      kept.push_back(std::move(run));
    }
  }
  r.runs = std::move(kept);
  return r;
}

inline bool row_less(const TrialResult& a, const TrialResult& b) {
  return std::tie(a.instance_seed, a.algorithm, a.trial) <
         std::tie(b.instance_seed, b.algorithm, b.trial);
}

using ProgressCallback = std::function<void(const TrialResult&, std::size_t done, std::size_t total)>;

/// Every (instance, algorithm, trial) combination, rows sorted by
/// (instance_seed, algorithm, trial). Trials are independent jobs spread over
/// `spec.jobs` workers; each has its own seed, so the rows do not depend on
/// scheduling.
inline std::vector<TrialResult> run_experiment(const ExperimentSpec& spec,
                                               const ProgressCallback& progress = {}) {
  spec.validate();
  struct Job {
    std::size_t instance;
    AlgorithmKind kind;
    std::size_t trial;
  };
  std::vector<ProblemInstance> instances;
  for (std::size_t i = 0; i < spec.instances; ++i) {
    instances.push_back(
        make_instance(spec.problem, instance_seed(spec.seed, i), spec.instance_options));
  }
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < spec.instances; ++i) {
    for (const auto& name : spec.algorithms) {
      for (std::size_t t = 0; t < spec.trials; ++t) jobs.push_back({i, *parse_algorithm(name), t});
    }
  }
  std::vector<TrialResult> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      try {
        const Job& j = jobs[k];
        rows[k] = run_trial(instances[j.instance], j.kind, spec, j.trial);
        std::lock_guard lock(mu);
        ++done;
        if (progress) progress(rows[k], done, jobs.size());
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  const std::size_t workers = std::min(spec.jobs, jobs.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::stable_sort(rows.begin(), rows.end(), row_less);
  return rows;
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

struct AlgorithmSummary {
  std::string algorithm;
  std::size_t runs = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double best = 0.0;
  std::size_t overall_wins = 0;  // instances where it beat every other algorithm
  std::size_t overall_ties = 0;  // instances where it shared the top mean
};

struct PairComparison {
  std::string a;
  std::string b;
  std::size_t wins = 0;  // instances where a's mean beats b's
  std::size_t losses = 0;
  std::size_t ties = 0;
  std::optional<double> confidence;  // Welch 1 - p over all runs
};

struct ComparisonReport {
  std::string problem;
  std::size_t instances = 0;
  std::vector<AlgorithmSummary> algorithms;
  std::vector<PairComparison> pairs;
};

/// Aggregates computed from raw rows only, so `report` can rebuild them.
inline ComparisonReport compare(const std::vector<TrialResult>& rows) {
  ComparisonReport rep;
  if (rows.empty()) return rep;
  rep.problem = rows.front().problem;
  std::vector<std::string> algos;
  std::vector<std::uint64_t> instances;
  std::map<std::string, std::vector<double>> scores;
  std::map<std::pair<std::uint64_t, std::string>, std::vector<double>> per_instance;
  for (const auto& r : rows) {
    if (std::find(algos.begin(), algos.end(), r.algorithm) == algos.end()) {
      algos.push_back(r.algorithm);
    }
    if (std::find(instances.begin(), instances.end(), r.instance_seed) == instances.end()) {
      instances.push_back(r.instance_seed);
    }
    scores[r.algorithm].push_back(r.best_score);
    per_instance[{r.instance_seed, r.algorithm}].push_back(r.best_score);
  }
  std::sort(algos.begin(), algos.end());
  rep.instances = instances.size();
  auto instance_mean = [&](std::uint64_t inst, const std::string& a) -> std::optional<double> {
    auto it = per_instance.find({inst, a});
    if (it == per_instance.end()) return std::nullopt;
    return moments(it->second).mean;
  };
  for (const auto& a : algos) {
    AlgorithmSummary s;
    s.algorithm = a;
    const auto m = moments(scores[a]);
    s.runs = m.n;
    s.mean = m.mean;
    s.stddev = std::sqrt(m.variance);
    s.best = *std::max_element(scores[a].begin(), scores[a].end());
    rep.algorithms.push_back(s);
  }
  for (auto inst : instances) {
    double top = -INFINITY;
    for (const auto& a : algos) {
      if (auto m = instance_mean(inst, a)) top = std::max(top, *m);
    }
    std::vector<std::size_t> leaders;
    for (std::size_t i = 0; i < algos.size(); ++i) {
      if (auto m = instance_mean(inst, algos[i]); m && *m == top) leaders.push_back(i);
    }
    for (auto i : leaders) {
      if (leaders.size() == 1) {
        ++rep.algorithms[i].overall_wins;
      } else {
        ++rep.algorithms[i].overall_ties;
      }
    }
  }
  for (std::size_t i = 0; i < algos.size(); ++i) {
    for (std::size_t j = i + 1; j < algos.size(); ++j) {
      PairComparison p;
      p.a = algos[i];
      p.b = algos[j];
      for (auto inst : instances) {
        const auto ma = instance_mean(inst, p.a);
        const auto mb = instance_mean(inst, p.b);
        if (!ma || !mb) continue;
        if (*ma > *mb) {
          ++p.wins;
        } else if (*ma < *mb) {
          ++p.losses;
        } else {
          ++p.ties;
        }
      }
      const auto& sa = scores[p.a];
      const auto& sb = scores[p.b];
      if (sa.size() >= 2 && sb.size() >= 2) p.confidence = significance(sa, sb);
      rep.pairs.push_back(p);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline constexpr std::string_view kRawHeader =
    "problem,instance_seed,algorithm,trial,best_score,evals_used,wall_ms";

inline void write_raw_csv(std::ostream& out, const std::vector<TrialResult>& rows) {
  out << kRawHeader << '\n';
  for (const auto& r : rows) {
    out << r.problem << ',' << r.instance_seed << ',' << r.algorithm << ',' << r.trial << ','
        << format_double(r.best_score) << ',' << r.evals_used << ',' << r.wall_ms << '\n';
  }
}

inline std::vector<TrialResult> read_raw_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRawHeader) {
    throw IoError("raw results: missing or unexpected header");
  }
  std::vector<TrialResult> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw IoError("raw results: bad field count on line " + std::to_string(line_no));
    try {
      TrialResult r;
      r.problem = f[0];
      r.instance_seed = std::stoull(f[1]);
      r.algorithm = f[2];
      r.trial = std::stoull(f[3]);
      r.best_score = std::stod(f[4]);
      r.evals_used = std::stoull(f[5]);
      r.wall_ms = std::stoll(f[6]);
      rows.push_back(std::move(r));
    } catch (const std::exception&) {
      throw IoError("raw results: malformed value on line " + std::to_string(line_no));
    }
  }
  return rows;
}

inline void write_summary(std::ostream& out, const ComparisonReport& rep) {
  out << "# " << rep.problem << " (" << rep.instances << " instances)\n\n";
  out << "| algorithm | runs | mean | stddev | best | overall best (ties) |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const auto& a : rep.algorithms) {
    out << "| " << a.algorithm << " | " << a.runs << " | " << format_fixed(a.mean, 6) << " | "
        << format_fixed(a.stddev, 6) << " | " << format_fixed(a.best, 6) << " | "
        << a.overall_wins << " (" << a.overall_ties << ") |\n";
  }
  out << "\n| a | b | wins | losses | ties | confidence |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const auto& p : rep.pairs) {
    out << "| " << p.a << " | " << p.b << " | " << p.wins << " | " << p.losses << " | "
        << p.ties << " | " << (p.confidence ? format_fixed(*p.confidence, 4) : "n/a") << " |\n";
  }
}

inline std::string run_stem(const TrialResult& r) {
  return r.problem + "_" + std::to_string(r.instance_seed) + "_" + r.algorithm + "_" +
         std::to_string(r.trial);
}

inline void write_trace(std::ostream& out, const TrialResult& r) {
  for (const auto& p : r.trace) {
    nlohmann::ordered_json j;
    j["eval_index"] = p.eval_index;
    j["best_so_far"] = p.best_so_far;
    out << j.dump() << '\n';
  }
}

inline void write_history(std::ostream& out, const std::vector<TrialResult>& rows) {
  out << "problem,instance_seed,algorithm,trial,cycle,pool_size,pool_min,pool_max,pool_mean,"
         "epochs,restarts,stop_reason,correlation,batch_best,predicted_before,"
         "predicted_after,backdriven_mean,untouched_mean,inner_best,best_so_far,evals_spent\n";
  for (const auto& r : rows) {
    for (const auto& c : r.cycles) {
      out << r.problem << ',' << r.instance_seed << ',' << r.algorithm << ',' << r.trial << ','
          << c.cycle << ',' << c.pool_size << ',' << format_double(c.pool_min) << ','
          << format_double(c.pool_max) << ',' << format_double(c.pool_mean) << ',' << c.epochs
          << ',' << c.restarts << ',' << to_string(c.stop_reason) << ','
          << format_double(c.correlation) << ',' << format_double(c.batch_best) << ','
          << format_double(c.predicted_before) << ',' << format_double(c.predicted_after) << ','
          << format_double(c.backdriven_mean) << ',' << format_double(c.untouched_mean) << ','
          << format_double(c.inner_best) << ',' << format_double(c.best_so_far) << ','
          << c.evals_spent << '\n';
    }
  }
}

inline void write_snapshots(std::ostream& out, const std::vector<TrialResult>& rows) {
  for (const auto& r : rows) {
    for (const auto& run : r.runs) {
      nlohmann::ordered_json j;
      j["problem"] = r.problem;
      j["instance_seed"] = r.instance_seed;
      j["algorithm"] = r.algorithm;
      j["trial"] = r.trial;
      j["run"] = run.run_index;
      j["start_score"] = run.start_score;
      j["end_score"] = run.end_score;
      j["evals"] = run.evals;
      j["start"] = run.start.values();
      j["end"] = run.end.values();
      out << j.dump() << '\n';
    }
  }
}

inline void write_budget(std::ostream& out, const std::vector<TrialResult>& rows) {
  out << "problem,instance_seed,algorithm,trial";
  for (std::size_t p = 0; p < kPhaseCount; ++p) out << ',' << to_string(static_cast<Phase>(p));
  out << ",total\n";
  for (const auto& r : rows) {
    out << r.problem << ',' << r.instance_seed << ',' << r.algorithm << ',' << r.trial;
    std::uint64_t total = 0;
    for (auto n : r.per_phase) {
      out << ',' << n;
      total += n;
    }
    out << ',' << total << '\n';
  }
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

inline void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace detail

/// Writes raw.csv, summary.md, budget.csv and, when present, history.csv,
/// snapshots.jsonl and traces/<run>.jsonl under `dir`.
inline ComparisonReport emit_reports(const std::vector<TrialResult>& rows,
                                     const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  auto emit = [&](const fs::path& path, auto&& writer) {
    auto out = detail::open_out(path);
    writer(out);
    detail::check_written(out, path);
  };
  const ComparisonReport rep = compare(rows);
  emit(dir / "raw.csv", [&](std::ostream& o) { write_raw_csv(o, rows); });
  emit(dir / "summary.md", [&](std::ostream& o) { write_summary(o, rep); });
  emit(dir / "budget.csv", [&](std::ostream& o) { write_budget(o, rows); });
  const bool any_cycles = std::any_of(rows.begin(), rows.end(),
                                      [](const auto& r) { return !r.cycles.empty(); });
  if (any_cycles) emit(dir / "history.csv", [&](std::ostream& o) { write_history(o, rows); });
  const bool any_runs =
      std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.runs.empty(); });
  if (any_runs) emit(dir / "snapshots.jsonl", [&](std::ostream& o) { write_snapshots(o, rows); });
  const bool any_trace =
      std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.trace.empty(); });
  if (any_trace) {
    fs::create_directories(dir / "traces", ec);
    if (ec) throw IoError("cannot create " + (dir / "traces").string());
    for (const auto& r : rows) {
      emit(dir / "traces" / (run_stem(r) + ".jsonl"), [&](std::ostream& o) { write_trace(o, r); });
    }
  }
  return rep;
}

/// Rebuilds summary.md from raw.csv in `dir`.
inline ComparisonReport regenerate_summary(const std::filesystem::path& dir) {
  std::ifstream in(dir / "raw.csv");
  if (!in) throw IoError("cannot read " + (dir / "raw.csv").string());
  const auto rows = read_raw_csv(in);
  const auto rep = compare(rows);
  auto out = detail::open_out(dir / "summary.md");
  write_summary(out, rep);
  detail::check_written(out, dir / "summary.md");
  return rep;
}

}  // namespace deepopt

#endif  // DEEPOPT_HARNESS_HPP
