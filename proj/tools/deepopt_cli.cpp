// Command-line experiment runner.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "deepopt/harness.hpp"
#include "deepopt/oracle.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kIo = 3 };

struct RunOptions {
  std::string problem = "sines";
  std::vector<std::string> algorithms;
  std::size_t instances = 20;
  std::size_t trials = 1;
  std::uint64_t budget = 500000;
  std::uint64_t seed = 0;
  std::string out = "results";
  std::string arch = "deep5";
  std::string preset;
  std::string inner = "nash-v3";
  std::string y_prime_mode = "best";
  std::size_t pool = 10000;
  std::size_t max_epochs = 200;
  std::size_t max_inversion = 500;
  double ceiling = 1.0;
  std::size_t population = 50;
  std::size_t jobs = 1;
  bool timing = false;
  bool no_traces = false;
  bool quiet = false;
};

deepopt::Architecture parse_arch(const std::string& s) {
  if (s == "deep5") return deepopt::Architecture::deep5;
  if (s == "deep10") return deepopt::Architecture::deep10;
  throw deepopt::UsageError("unknown architecture '" + s + "' (deep5, deep10)");
}

deepopt::InnerSearch parse_inner(const std::string& s) {
  if (s == "nash-v1") return deepopt::InnerSearch::nash_v1;
  if (s == "nash-v2") return deepopt::InnerSearch::nash_v2;
  if (s == "nash-v3") return deepopt::InnerSearch::nash_v3;
  throw deepopt::UsageError("unknown inner search '" + s + "' (nash-v1, nash-v2, nash-v3)");
}

deepopt::ProblemKind parse_problem(const std::string& s) {
  auto k = deepopt::parse_problem_kind(s);
  if (!k) throw deepopt::UsageError("unknown problem '" + s + "'");
  return *k;
}

int run_command(const RunOptions& o, const CLI::App& cmd, const deepopt::InstanceOptions& inst) {
  using namespace deepopt;
  ExperimentSpec spec;
  spec.problem = parse_problem(o.problem);
  spec.algorithms = o.algorithms;
  if (!o.preset.empty()) apply_preset(spec, o.preset);
  if (o.preset.empty() || cmd.count("--instances") > 0) spec.instances = o.instances;
  if (o.preset.empty() || cmd.count("--budget") > 0) spec.budget = o.budget;
  spec.trials = o.trials;
  spec.seed = o.seed;
  if (cmd.count("--seed") == 0) {
    if (const char* env = std::getenv("DEEPOPT_SEED")) {
      try {
        spec.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw UsageError("DEEPOPT_SEED is not an unsigned integer");
      }
    }
  }
  spec.out_dir = o.out;
  spec.architecture = parse_arch(o.arch);
  spec.instance_options = inst;
  spec.timing = o.timing;
  spec.traces = !o.no_traces;
  spec.deepopt.inner_search = parse_inner(o.inner);
  if (o.y_prime_mode == "best") {
    spec.deepopt.y_prime_mode = YPrimeMode::best;
  } else if (o.y_prime_mode == "last") {
    spec.deepopt.y_prime_mode = YPrimeMode::last;
  } else {
    throw UsageError("unknown y-prime mode '" + o.y_prime_mode + "' (best, last)");
  }
  spec.deepopt.pool_capacity = o.pool;
  spec.deepopt.y_prime_size = std::min(spec.deepopt.y_prime_size, o.pool);
  spec.deepopt.train.max_epochs = o.max_epochs;
  spec.deepopt.generator.max_iterations = o.max_inversion;
  spec.deepopt.scaling.ceiling = o.ceiling;
  spec.ga.population_size = o.population;
  spec.jobs = o.jobs;
  try {
    spec.validate();
    spec.deepopt.validate();
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  auto progress = [&](const TrialResult& r, std::size_t done, std::size_t total) {
    if (o.quiet) return;
    std::cerr << "[" << done << "/" << total << "] " << r.algorithm << " instance "
              << r.instance_seed << " trial " << r.trial << ": best " << r.best_score
              << " (" << r.evals_used << " evals)\n";
    for (const auto& w : r.warnings) std::cerr << "  warning: " << w << "\n";
  };
  const auto rows = run_experiment(spec, progress);
  const auto report = emit_reports(rows, spec.out_dir);
  write_summary(std::cout, report);
  return kOk;
}

int oracle_command(std::uint64_t seed) {
  using namespace deepopt;
  Rng rng = rng_stream(seed, Stream::instance);
  const auto sines = oracle::sines_1d_optimum();
  std::cout << "sines: 1-D optimum p* = " << format_double(sines.location)
            << ", value = " << format_double(sines.value)
            << ", 50-D optimum = " << format_double(50.0 * sines.value) << "\n";

  const BandwidthProblem bw(random_simple_graph(8, 12, rng));
  const auto b = oracle::best_over_orderings(bw);
  std::cout << "bandwidth (8 vertices, 12 edges): minimum bandwidth " << -b.score << " over "
            << b.evaluated << " labelings\n";

  SeatingInstance si = SeatingInstance::random(rng, 4, 2, 3);
  const SeatingProblem seating(si);
  const auto s = oracle::best_over_orderings(seating);
  std::cout << "seating (4 groups, 2 tables, capacity 3): best score " << format_double(s.score)
            << " over " << s.evaluated << " orderings\n";

  const ConstraintsDiscreteProblem cd(random_directed_edges(4, 6, rng));
  const auto c = oracle::best_letter_assignment(cd);
  std::cout << "constraints-discrete (4 nodes, 6 edges): least error " << format_double(-c.score)
            << " over " << c.evaluated << " assignments\n";

  const CheckerboardProblem cb(5);
  const auto k = oracle::best_bit_pattern(cb);
  std::cout << "checkerboard (5x5): best score " << k.score << " of " << cb.max_score() << " over "
            << k.evaluated << " patterns\n";
  return kOk;
}

int report_command(const std::string& dir) {
  const auto rep = deepopt::regenerate_summary(dir);
  deepopt::write_summary(std::cout, rep);
  return kOk;
}

int instance_command(const std::string& problem, std::uint64_t seed, const std::string& out,
                     const deepopt::InstanceOptions& opt) {
  using namespace deepopt;
  const auto inst = make_instance(parse_problem(problem), seed, opt);
  if (const Graph* g = instance_graph(*inst.problem)) {
    write_edge_list(out, *g);
  } else if (auto* t = dynamic_cast<const TrianglesProblem*>(inst.problem.get())) {
    pgm::write(out, t->target());
  } else {
    throw UsageError("problem '" + problem + "' has no exportable instance data");
  }
  std::cout << "wrote " << out << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deep-Opt: learned landscape models for stochastic search"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file with option values (flags override it)");

  RunOptions ro;
  deepopt::InstanceOptions inst;
  auto* run = app.add_subcommand("run", "Run a comparison experiment");
  run->add_option("--problem", ro.problem, "Problem kind")->required();
  run->add_option("--algo", ro.algorithms,
                  "Algorithm, repeatable (" + deepopt::algorithm_list() + ")")
      ->required();
  run->add_option("--instances", ro.instances, "Number of problem instances");
  run->add_option("--trials", ro.trials, "Trials per algorithm and instance");
  run->add_option("--budget", ro.budget, "Evaluations per trial");
  run->add_option("--seed", ro.seed, "Root seed (default: $DEEPOPT_SEED, else 0)");
  run->add_option("--out", ro.out, "Output directory");
  run->add_option("--arch", ro.arch, "Network for deep-opt-ga (deep5, deep10)");
  run->add_option("--preset", ro.preset, "Scale preset (paper, desk)");
  run->add_option("--inner", ro.inner, "Deep-Opt inner NASH variant (nash-v1, nash-v2, nash-v3)");
  run->add_option("--y-prime-mode", ro.y_prime_mode, "Y' selection (best, last)");
  run->add_option("--pool", ro.pool, "Sample pool capacity");
  run->add_option("--max-epochs", ro.max_epochs, "Training epochs per cycle, upper bound");
  run->add_option("--max-inversion", ro.max_inversion, "Inversion iterations, upper bound");
  run->add_option("--ceiling", ro.ceiling, "Score scaling ceiling Z in (0, 1]");
  run->add_option("--population", ro.population, "GA population size");
  run->add_option("--jobs", ro.jobs, "Trials run in parallel");
  run->add_option("--graph", inst.graph_path, "Edge list for graph problems");
  run->add_option("--image", inst.image_path, "PGM target for the triangle problem");
  run->add_flag("--timing", ro.timing, "Record wall-clock time per trial");
  run->add_flag("--no-traces", ro.no_traces, "Skip per-evaluation trace files");
  run->add_flag("--quiet", ro.quiet, "No progress output");

  std::uint64_t oracle_seed = 0;
  auto* orc = app.add_subcommand("oracle", "Exhaustive searches on small instances");
  orc->add_option("--seed", oracle_seed, "Instance seed");

  std::string report_dir = "results";
  auto* rep = app.add_subcommand("report", "Rebuild summary.md from raw.csv");
  rep->add_option("--out", report_dir, "Results directory");

  std::string inst_problem;
  std::uint64_t inst_seed = 0;
  std::string inst_out;
  deepopt::InstanceOptions export_opt;
  auto* ins = app.add_subcommand("instance", "Export the static data of an instance");
  ins->add_option("--problem", inst_problem, "Problem kind")->required();
  ins->add_option("--seed", inst_seed, "Instance seed");
  ins->add_option("--out", inst_out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return run_command(ro, *run, inst);
    if (*orc) return oracle_command(oracle_seed);
    if (*rep) return report_command(report_dir);
    if (*ins) return instance_command(inst_problem, inst_seed, inst_out, export_opt);
  } catch (const deepopt::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const deepopt::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
