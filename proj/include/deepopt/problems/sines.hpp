#ifndef DEEPOPT_PROBLEMS_SINES_HPP
#define DEEPOPT_PROBLEMS_SINES_HPP

#include <cmath>

#include "deepopt/problem.hpp"

namespace deepopt {

/// Sum of p*sin(p) over independent parameters decoded to [0, 100].
class SinesProblem : public Problem {
 public:
  static constexpr double kRange = 100.0;

  explicit SinesProblem(std::size_t dim = 50) : dim_(dim) {
    if (dim == 0) throw Error("sines: dimension must be positive");
  }

  std::string_view name() const override { return "sines"; }
  std::size_t dimension() const override { return dim_; }

  static double decode(double gene) { return kRange * gene; }

  double true_score(std::span<const double> x) const override {
    check_dimension(x);
    double total = 0.0;
    for (double g : x) {
      const double p = decode(g);
      total += p * std::sin(p);
    }
    return total;
  }

 private:
  std::size_t dim_;
};

/// Sines normalized by dim*100 plus fresh Uniform[0, 0.5] noise per call.
class NoisySinesProblem : public Problem {
 public:
  static constexpr double kNoiseWidth = 0.5;

  explicit NoisySinesProblem(std::size_t dim = 50) : base_(dim) {}

  std::string_view name() const override { return "noisy-sines"; }
  std::size_t dimension() const override { return base_.dimension(); }
  bool noisy() const override { return true; }

  double true_score(std::span<const double> x) const override {
    return base_.true_score(x) /
           (static_cast<double>(dimension()) * SinesProblem::kRange);
  }

  double evaluate(std::span<const double> x, Rng& noise) const override {
    return true_score(x) + noise.uniform(0.0, kNoiseWidth);
  }

 private:
  SinesProblem base_;
};

inline double eval_sines(std::span<const double> x) {
  return SinesProblem(x.size()).true_score(x);
}

}  // namespace deepopt

#endif  // DEEPOPT_PROBLEMS_SINES_HPP
