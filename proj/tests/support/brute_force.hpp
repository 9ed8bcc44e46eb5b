#ifndef DEEPOPT_TESTS_BRUTE_FORCE_HPP
#define DEEPOPT_TESTS_BRUTE_FORCE_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "deepopt/problems.hpp"

// Oracles written straight from the problem rules. They share nothing with
// the library's decoders beyond the instance data types.

namespace brute {

using deepopt::Graph;
using deepopt::SeatingInstance;

// 1-D optimum of p*sin(p) on [0, 100], computed with scipy (dense grid plus
// bounded scalar minimization) outside this code base.
constexpr double kSinesArgmax = 95.82901078926407;
constexpr double kSinesMax = 95.82379360846565;

constexpr double kUnseatedPenalty = 1000.0;  // per person

// ---- bandwidth -------------------------------------------------------------

// Label of v = 1 + number of vertices ranked before it (smaller gene, or
// equal gene and smaller index).
inline std::vector<std::size_t> rank_labels(std::span<const double> x) {
  std::vector<std::size_t> label(x.size(), 1);
  for (std::size_t v = 0; v < x.size(); ++v) {
    for (std::size_t u = 0; u < x.size(); ++u) {
      if (x[u] < x[v] || (x[u] == x[v] && u < v)) ++label[v];
    }
  }
  return label;
}

inline std::size_t bandwidth(const Graph& g, const std::vector<std::size_t>& label) {
  std::size_t bw = 0;
  for (const auto& e : g.edges) {
    const auto a = label[e.from], b = label[e.to];
    bw = std::max(bw, a > b ? a - b : b - a);
  }
  return bw;
}

inline std::size_t oracle_min_bandwidth(const Graph& g) {
  std::vector<std::size_t> label(g.vertices);
  std::iota(label.begin(), label.end(), std::size_t{1});
  std::size_t best = g.vertices;
  do {
    best = std::min(best, bandwidth(g, label));
  } while (std::next_permutation(label.begin(), label.end()));
  return best;
}

// ---- seating ---------------------------------------------------------------

// table[g] in 0..T-1, or -1 when unseated.
inline double seating_score(const SeatingInstance& inst, const std::vector<long>& table) {
  double s = 0.0;
  for (std::size_t a = 0; a < table.size(); ++a) {
    if (table[a] < 0) {
      s -= kUnseatedPenalty * inst.group_sizes[a];
      continue;
    }
    for (std::size_t b = 0; b < table.size(); ++b) {
      if (a != b && table[a] == table[b]) s += inst.preference[a][b];
    }
  }
  return s;
}

// Repeatedly take the largest not-yet-visited (group, table) gene, earliest
// position on equal values, and seat the group there if it is free and fits.
inline std::vector<long> greedy_seating(const SeatingInstance& inst, std::span<const double> x) {
  const std::size_t G = inst.groups();
  const std::size_t T = inst.tables;
  std::vector<long> table(G, -1);
  std::vector<int> used(T, 0);
  std::vector<bool> visited(x.size(), false);
  for (std::size_t step = 0; step < x.size(); ++step) {
    std::size_t pick = x.size();
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (!visited[k] && (pick == x.size() || x[k] > x[pick])) pick = k;
    }
    visited[pick] = true;
    const std::size_t g = pick / T;
    const std::size_t t = pick % T;
    if (table[g] < 0 && used[t] + inst.group_sizes[g] <= inst.capacity) {
      table[g] = static_cast<long>(t);
      used[t] += inst.group_sizes[g];
    }
  }
  return table;
}

// Seating optimum over every capacity-respecting map group -> table or
// unseated; groups that still fit somewhere are never left unseated.
inline double oracle_seating(const SeatingInstance& inst) {
  const std::size_t G = inst.groups();
  const std::size_t T = inst.tables;
  std::size_t total = 1;
  for (std::size_t i = 0; i < G; ++i) total *= T + 1;
  double best = -INFINITY;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<long> table(G);
    std::size_t c = code;
    for (std::size_t g = 0; g < G; ++g) {
      table[g] = static_cast<long>(c % (T + 1)) - 1;
      c /= T + 1;
    }
    std::vector<int> used(T, 0);
    for (std::size_t g = 0; g < G; ++g) {
      if (table[g] >= 0) used[static_cast<std::size_t>(table[g])] += inst.group_sizes[g];
    }
    bool ok = true;
    for (int u : used) ok = ok && u <= inst.capacity;
    for (std::size_t g = 0; g < G && ok; ++g) {
      if (table[g] >= 0) continue;
      for (std::size_t t = 0; t < T; ++t) {
        if (used[t] + inst.group_sizes[g] <= inst.capacity) ok = false;
      }
    }
    if (ok) best = std::max(best, seating_score(inst, table));
  }
  return best;
}

// ---- constraints -----------------------------------------------------------

inline double constraint_error(const Graph& g, const std::vector<double>& v) {
  double err = 0.0;
  for (const auto& e : g.edges) {
    if (v[e.from] <= v[e.to]) err += std::fabs(v[e.from] - v[e.to]);
  }
  return err;
}

// Node value = (index of the first largest gene in its 16-gene block) / 15.
inline std::vector<double> letter_values(std::span<const double> x, std::size_t nodes) {
  std::vector<double> v(nodes);
  for (std::size_t n = 0; n < nodes; ++n) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 16; ++k) {
      if (x[n * 16 + k] > x[n * 16 + best]) best = k;
    }
    v[n] = static_cast<double>(best) / 15.0;
  }
  return v;
}

// Least constraint error over letter values, straight from the rule.
inline double oracle_min_letter_error(const Graph& g) {
  const std::size_t n = g.vertices;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 16;
  double best = INFINITY;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<double> v(n);
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = static_cast<double>(c % 16) / 15.0;
      c /= 16;
    }
    best = std::min(best, constraint_error(g, v));
  }
  return best;
}

// ---- checkerboard ----------------------------------------------------------

// Literal neighbour count on a side x side grid: interior cells only, one
// point per differing orthogonal neighbour.
inline int oracle_checkerboard(const std::vector<int>& bits, int side) {
  int score = 0;
  for (int r = 1; r + 1 < side; ++r) {
    for (int c = 1; c + 1 < side; ++c) {
      const int me = bits[static_cast<std::size_t>(r * side + c)];
      score += bits[static_cast<std::size_t>((r - 1) * side + c)] != me;
      score += bits[static_cast<std::size_t>((r + 1) * side + c)] != me;
      score += bits[static_cast<std::size_t>(r * side + c - 1)] != me;
      score += bits[static_cast<std::size_t>(r * side + c + 1)] != me;
    }
  }
  return score;
}

// ---- crossings -------------------------------------------------------------

// Floating-point proper intersection for points in general position.
inline bool oracle_cross(double ax, double ay, double bx, double by, double cx, double cy,
                         double dx, double dy) {
  auto orient = [](double px, double py, double qx, double qy, double rx, double ry) {
    const double v = (qx - px) * (ry - py) - (qy - py) * (rx - px);
    return (v > 0) - (v < 0);
  };
  return orient(ax, ay, bx, by, cx, cy) * orient(ax, ay, bx, by, dx, dy) < 0 &&
         orient(cx, cy, dx, dy, ax, ay) * orient(cx, cy, dx, dy, bx, by) < 0;
}

}  // namespace brute

#endif  // DEEPOPT_TESTS_BRUTE_FORCE_HPP
