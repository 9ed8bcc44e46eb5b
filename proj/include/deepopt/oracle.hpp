#ifndef DEEPOPT_ORACLE_HPP
#define DEEPOPT_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "deepopt/problems.hpp"

// Exhaustive searches through the library's own decoders. Only feasible on
// the small instances they are meant for.

namespace deepopt::oracle {

struct Optimum {
  double score = 0.0;
  Candidate solution;
  std::uint64_t evaluated = 0;
};

/// Every ordering of the genes, realised as rank-spaced genotypes. Covers
/// every outcome of a sort-based decoder.
inline Optimum best_over_orderings(const Problem& p) {
  const std::size_t n = p.dimension();
  if (n > 10) throw Error("oracle: too many genes for an ordering search");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Optimum best;
  bool first = true;
  Candidate x(n);
  do {
    for (std::size_t i = 0; i < n; ++i) {
      x[perm[i]] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    }
    const double s = p.true_score(x.view());
    ++best.evaluated;
    if (first || s > best.score) {
      best.score = s;
      best.solution = x;
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Every letter assignment of a discrete constraint instance.
inline Optimum best_letter_assignment(const ConstraintsDiscreteProblem& p) {
  const std::size_t nodes = p.graph().vertices;
  const std::size_t L = ConstraintsDiscreteProblem::kLetters;
  if (nodes > 5) throw Error("oracle: too many nodes for a letter search");
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < nodes; ++i) total *= L;
  Optimum best;
  Candidate x(p.dimension());
  for (std::uint64_t code = 0; code < total; ++code) {
    std::fill(x.begin(), x.end(), 0.0);
    std::uint64_t c = code;
    for (std::size_t v = 0; v < nodes; ++v) {
      x[v * L + c % L] = 1.0;
      c /= L;
    }
    const double s = p.true_score(x.view());
    if (code == 0 || s > best.score) {
      best.score = s;
      best.solution = x;
    }
    ++best.evaluated;
  }
  return best;
}

/// Every bit pattern of a small checkerboard.
inline Optimum best_bit_pattern(const CheckerboardProblem& p) {
  const std::size_t n = p.dimension();
  if (n > 25) throw Error("oracle: too many bits for a pattern search");
  Optimum best;
  Candidate x(n);
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
    for (std::size_t i = 0; i < n; ++i) x[i] = (code >> i) & 1U ? 1.0 : 0.0;
    const double s = p.true_score(x.view());
    if (code == 0 || s > best.score) {
      best.score = s;
      best.solution = x;
    }
    ++best.evaluated;
  }
  return best;
}

/// Location and value of max p·sin(p) on [0, 100]: dense grid, then golden
/// section refinement around the best grid point.
struct SinesOptimum {
  double location = 0.0;
  double value = 0.0;
};

inline SinesOptimum sines_1d_optimum(std::size_t grid = 1000000) {
  auto f = [](double p) { return p * std::sin(p); };
  double best_p = 0.0;
  double best_v = f(0.0);
  for (std::size_t i = 1; i <= grid; ++i) {
    const double p = 100.0 * static_cast<double>(i) / static_cast<double>(grid);
    if (const double v = f(p); v > best_v) {
      best_v = v;
      best_p = p;
    }
  }
  const double step = 100.0 / static_cast<double>(grid);
  double a = std::max(0.0, best_p - step);
  double b = std::min(100.0, best_p + step);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double c = b - r * (b - a);
    const double d = a + r * (b - a);
    if (f(c) > f(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  const double p = 0.5 * (a + b);
  return {p, f(p)};
}

}  // namespace deepopt::oracle

#endif  // DEEPOPT_ORACLE_HPP
