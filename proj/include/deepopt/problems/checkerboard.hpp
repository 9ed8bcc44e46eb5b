#ifndef DEEPOPT_PROBLEMS_CHECKERBOARD_HPP
#define DEEPOPT_PROBLEMS_CHECKERBOARD_HPP

#include <vector>

#include "deepopt/problem.hpp"

namespace deepopt {

/// Threshold reading of a real gene: strictly over 0.5 is a 1.
inline int threshold_bit(double gene) { return gene > 0.5 ? 1 : 0; }

/// For every interior cell, one point per 4-neighbor holding the opposite bit.
inline int checkerboard_score(const std::vector<int>& bits, std::size_t side) {
  int total = 0;
  for (std::size_t r = 1; r + 1 < side; ++r) {
    for (std::size_t c = 1; c + 1 < side; ++c) {
      const int b = bits[r * side + c];
      total += (bits[(r - 1) * side + c] != b) + (bits[(r + 1) * side + c] != b) +
               (bits[r * side + c - 1] != b) + (bits[r * side + c + 1] != b);
    }
  }
  return total;
}

class CheckerboardProblem : public Problem {
 public:
  explicit CheckerboardProblem(std::size_t side = 15) : side_(side) {
    if (side < 3) throw Error("checkerboard: side must be at least 3");
  }

  std::string_view name() const override { return "checkerboard"; }
  std::size_t dimension() const override { return side_ * side_; }
  bool binary() const override { return true; }
  std::size_t side() const { return side_; }

  int max_score() const {
    const int inner = static_cast<int>(side_ - 2);
    return inner * inner * 4;
  }

  std::vector<int> bits(std::span<const double> x) const {
    check_dimension(x);
    std::vector<int> b(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) b[i] = threshold_bit(x[i]);
    return b;
  }

  double true_score(std::span<const double> x) const override {
    return checkerboard_score(bits(x), side_);
  }

 private:
  std::size_t side_;
};

}  // namespace deepopt

#endif  // DEEPOPT_PROBLEMS_CHECKERBOARD_HPP
