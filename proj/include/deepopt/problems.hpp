#ifndef DEEPOPT_PROBLEMS_HPP
#define DEEPOPT_PROBLEMS_HPP

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "deepopt/problem.hpp"
#include "deepopt/problems/checkerboard.hpp"
#include "deepopt/problems/graph.hpp"
#include "deepopt/problems/graph_problems.hpp"
#include "deepopt/problems/seating.hpp"
#include "deepopt/problems/sines.hpp"
#include "deepopt/problems/triangles.hpp"

namespace deepopt {

enum class ProblemKind {
  sines,
  noisy_sines,
  seating,
  bandwidth,
  constraints_real,
  constraints_discrete,
  crossings,
  triangles,
  checkerboard,
};

inline constexpr std::array<std::pair<ProblemKind, std::string_view>, 9>
    kProblemNames{{
        {ProblemKind::sines, "sines"},
        {ProblemKind::noisy_sines, "noisy-sines"},
        {ProblemKind::seating, "seating"},
        {ProblemKind::bandwidth, "bandwidth"},
        {ProblemKind::constraints_real, "constraints-real"},
        {ProblemKind::constraints_discrete, "constraints-discrete"},
        {ProblemKind::crossings, "crossings"},
        {ProblemKind::triangles, "triangles"},
        {ProblemKind::checkerboard, "checkerboard"},
    }};

inline std::string_view to_string(ProblemKind kind) {
  for (const auto& [k, name] : kProblemNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

inline std::optional<ProblemKind> parse_problem_kind(std::string_view name) {
  for (const auto& [k, n] : kProblemNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

/// Optional overrides for instance construction.
struct InstanceOptions {
  std::string image_path;  // triangles target (PGM)
  std::string graph_path;  // edge list for graph problems
  std::size_t bandwidth_vertices = 50;
  std::size_t bandwidth_edges = 150;
  std::size_t triangle_count = 50;
};

struct ProblemInstance {
  ProblemKind kind;
  std::uint64_t instance_seed = 0;
  std::shared_ptr<const Problem> problem;

  std::size_t dimension() const { return problem->dimension(); }
};

/// Deterministic instance for (kind, seed). Sines and checkerboard have no
/// random data; the seed is carried for bookkeeping only.
inline ProblemInstance make_instance(ProblemKind kind, std::uint64_t seed,
                                     const InstanceOptions& opt = {}) {
  Rng rng = rng_stream(seed, Stream::instance);
  auto graph_or = [&](auto&& make_random, std::size_t vertices) -> Graph {
    if (!opt.graph_path.empty()) return read_edge_list(opt.graph_path, vertices);
    return make_random();
  };
  std::shared_ptr<const Problem> p;
  switch (kind) {
    case ProblemKind::sines:
      p = std::make_shared<SinesProblem>(50);
      break;
    case ProblemKind::noisy_sines:
      p = std::make_shared<NoisySinesProblem>(50);
      break;
    case ProblemKind::seating:
      p = std::make_shared<SeatingProblem>(SeatingInstance::random(rng));
      break;
    case ProblemKind::bandwidth: {
      const std::size_t v = opt.bandwidth_vertices;
      p = std::make_shared<BandwidthProblem>(graph_or(
          [&] { return random_simple_graph(v, opt.bandwidth_edges, rng); },
          opt.graph_path.empty() ? v : 0));
      break;
    }
    case ProblemKind::constraints_real:
      p = std::make_shared<ConstraintsRealProblem>(
          graph_or([&] { return random_directed_edges(100, 2000, rng); }, 100));
      break;
    case ProblemKind::constraints_discrete:
      p = std::make_shared<ConstraintsDiscreteProblem>(
          graph_or([&] { return random_directed_edges(100, 2000, rng); }, 100));
      break;
    case ProblemKind::crossings:
      p = std::make_shared<CrossingsProblem>(
          graph_or([&] { return random_simple_graph(25, 50, rng); }, 25));
      break;
    case ProblemKind::triangles: {
      GrayImage target = opt.image_path.empty() ? synthetic_target(rng)
                                                : pgm::read(opt.image_path);
      p = std::make_shared<TrianglesProblem>(std::move(target), opt.triangle_count);
      break;
    }
    case ProblemKind::checkerboard:
      p = std::make_shared<CheckerboardProblem>(15);
      break;
  }
  return {kind, seed, std::move(p)};
}

inline ProblemInstance make_instance(std::string_view kind, std::uint64_t seed,
                                     const InstanceOptions& opt = {}) {
  auto parsed = parse_problem_kind(kind);
  if (!parsed) throw Error("unknown problem kind: " + std::string(kind));
  return make_instance(*parsed, seed, opt);
}

/// Graph carried by a graph-based problem, if any.
inline const Graph* instance_graph(const Problem& p) {
  if (auto* b = dynamic_cast<const BandwidthProblem*>(&p)) return &b->graph();
  if (auto* c = dynamic_cast<const ConstraintsRealProblem*>(&p)) return &c->graph();
  if (auto* c = dynamic_cast<const ConstraintsDiscreteProblem*>(&p)) return &c->graph();
  if (auto* c = dynamic_cast<const CrossingsProblem*>(&p)) return &c->graph();
  return nullptr;
}

}  // namespace deepopt

#endif  // DEEPOPT_PROBLEMS_HPP
