#ifndef DEEPOPT_PROBLEMS_GRAPH_PROBLEMS_HPP
#define DEEPOPT_PROBLEMS_GRAPH_PROBLEMS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "deepopt/problem.hpp"
#include "deepopt/problems/graph.hpp"

namespace deepopt {

// ---------------------------------------------------------------------------
// Graph bandwidth
// ---------------------------------------------------------------------------

/// Labels 1..|V| assigned by ascending gene order; ties by vertex index.
inline std::vector<std::size_t> decode_bandwidth(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<std::size_t> label(x.size());
  for (std::size_t k = 0; k < order.size(); ++k) label[order[k]] = k + 1;
  return label;
}

inline std::size_t bandwidth_of(const Graph& g,
                                const std::vector<std::size_t>& label) {
  std::size_t worst = 0;
  for (const auto& e : g.edges) {
    const std::size_t a = label[e.from];
    const std::size_t b = label[e.to];
    worst = std::max(worst, a > b ? a - b : b - a);
  }
  return worst;
}

class BandwidthProblem : public Problem {
 public:
  explicit BandwidthProblem(Graph g) : graph_(std::move(g)) { graph_.validate(); }

  static BandwidthProblem random(Rng& rng, std::size_t vertices = 50,
                                 std::size_t edges = 150) {
    return BandwidthProblem(random_simple_graph(vertices, edges, rng));
  }

  std::string_view name() const override { return "bandwidth"; }
  std::size_t dimension() const override { return graph_.vertices; }
  const Graph& graph() const { return graph_; }

  std::size_t bandwidth(std::span<const double> x) const {
    check_dimension(x);
    return bandwidth_of(graph_, decode_bandwidth(x));
  }

  double true_score(std::span<const double> x) const override {
    return -static_cast<double>(bandwidth(x));
  }

 private:
  Graph graph_;
};

// ---------------------------------------------------------------------------
// Graph constraint satisfaction
// ---------------------------------------------------------------------------

/// Each directed edge asks value[from] > value[to]; a violated edge costs
/// |value[from] - value[to]|.
inline double constraint_error(const Graph& g, std::span<const double> value) {
  double error = 0.0;
  for (const auto& e : g.edges) {
    const double a = value[e.from];
    const double b = value[e.to];
    if (a <= b) error += b - a;
  }
  return error;
}

class ConstraintsRealProblem : public Problem {
 public:
  explicit ConstraintsRealProblem(Graph g) : graph_(std::move(g)) {
    graph_.validate();
  }

  static ConstraintsRealProblem random(Rng& rng, std::size_t vertices = 100,
                                       std::size_t edges = 2000) {
    return ConstraintsRealProblem(random_directed_edges(vertices, edges, rng));
  }

  std::string_view name() const override { return "constraints-real"; }
  std::size_t dimension() const override { return graph_.vertices; }
  const Graph& graph() const { return graph_; }

  double error(std::span<const double> x) const {
    check_dimension(x);
    return constraint_error(graph_, x);
  }

  double true_score(std::span<const double> x) const override {
    return -error(x);
  }

  /// |E| - error: positive, and |E| bounds the total error from above.
  double report_score(double score) const override {
    return static_cast<double>(graph_.edges.size()) + score;
  }

 private:
  Graph graph_;
};

class ConstraintsDiscreteProblem : public Problem {
 public:
  static constexpr std::size_t kLetters = 16;

  explicit ConstraintsDiscreteProblem(Graph g) : graph_(std::move(g)) {
    graph_.validate();
  }

  static ConstraintsDiscreteProblem random(Rng& rng, std::size_t vertices = 100,
                                           std::size_t edges = 2000) {
    return ConstraintsDiscreteProblem(
        random_directed_edges(vertices, edges, rng));
  }

  std::string_view name() const override { return "constraints-discrete"; }
  std::size_t dimension() const override { return graph_.vertices * kLetters; }
  const Graph& graph() const { return graph_; }

  /// Letter index per node: argmax of its 16-gene block, lowest index on ties.
  std::vector<std::size_t> decode(std::span<const double> x) const {
    check_dimension(x);
    std::vector<std::size_t> letter(graph_.vertices);
    for (std::size_t n = 0; n < graph_.vertices; ++n) {
      const auto block = x.subspan(n * kLetters, kLetters);
      letter[n] = static_cast<std::size_t>(
          std::max_element(block.begin(), block.end()) - block.begin());
    }
    return letter;
  }

  static double letter_value(std::size_t letter) {
    return static_cast<double>(letter) / static_cast<double>(kLetters - 1);
  }

  double error(std::span<const double> x) const {
    const auto letters = decode(x);
    std::vector<double> value(letters.size());
    for (std::size_t i = 0; i < letters.size(); ++i) {
      value[i] = letter_value(letters[i]);
    }
    return constraint_error(graph_, value);
  }

  double true_score(std::span<const double> x) const override {
    return -error(x);
  }

  double report_score(double score) const override {
    return static_cast<double>(graph_.edges.size()) + score;
  }

 private:
  Graph graph_;
};

// ---------------------------------------------------------------------------
// Rectilinear crossing minimization
// ---------------------------------------------------------------------------

namespace geometry {

struct GridPoint {
  std::int64_t x;
  std::int64_t y;
  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

inline constexpr double kGridScale = 1048576.0;  // 2^20 cells per unit

inline GridPoint snap(double x, double y) {
  return {std::llround(x * kGridScale), std::llround(y * kGridScale)};
}

inline int orientation(GridPoint a, GridPoint b, GridPoint c) {
  const std::int64_t v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  return (v > 0) - (v < 0);
}

/// c lies within the bounding box of collinear segment a-b.
inline bool within_box(GridPoint a, GridPoint b, GridPoint c) {
  return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
}

/// Closed-segment intersection test.
inline bool segments_intersect(GridPoint p1, GridPoint p2, GridPoint q1,
                               GridPoint q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && within_box(p1, p2, q1)) return true;
  if (o2 == 0 && within_box(p1, p2, q2)) return true;
  if (o3 == 0 && within_box(q1, q2, p1)) return true;
  if (o4 == 0 && within_box(q1, q2, p2)) return true;
  return false;
}

}  // namespace geometry

/// Pairs of edges without a shared vertex whose straight-line drawings meet.
inline std::size_t count_crossings(const Graph& g,
                                   std::span<const geometry::GridPoint> pos) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    for (std::size_t j = i + 1; j < g.edges.size(); ++j) {
      const auto& f = g.edges[j];
      if (e.from == f.from || e.from == f.to || e.to == f.from || e.to == f.to) {
        continue;
      }
      if (geometry::segments_intersect(pos[e.from], pos[e.to], pos[f.from],
                                       pos[f.to])) {
        ++count;
      }
    }
  }
  return count;
}

class CrossingsProblem : public Problem {
 public:
  explicit CrossingsProblem(Graph g) : graph_(std::move(g)) { graph_.validate(); }

  static CrossingsProblem random(Rng& rng, std::size_t vertices = 25,
                                 std::size_t edges = 50) {
    return CrossingsProblem(random_simple_graph(vertices, edges, rng));
  }

  std::string_view name() const override { return "crossings"; }
  std::size_t dimension() const override { return 2 * graph_.vertices; }
  const Graph& graph() const { return graph_; }

  std::vector<geometry::GridPoint> decode(std::span<const double> x) const {
    check_dimension(x);
    std::vector<geometry::GridPoint> pos(graph_.vertices);
    for (std::size_t v = 0; v < graph_.vertices; ++v) {
      pos[v] = geometry::snap(x[2 * v], x[2 * v + 1]);
    }
    return pos;
  }

  std::size_t crossings(std::span<const double> x) const {
    return count_crossings(graph_, decode(x));
  }

  double true_score(std::span<const double> x) const override {
    return -static_cast<double>(crossings(x));
  }

 private:
  Graph graph_;
};

}  // namespace deepopt

#endif  // DEEPOPT_PROBLEMS_GRAPH_PROBLEMS_HPP
