#ifndef DEEPOPT_PROBLEMS_SEATING_HPP
#define DEEPOPT_PROBLEMS_SEATING_HPP

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "deepopt/problem.hpp"

namespace deepopt {

struct SeatingInstance {
  std::vector<int> group_sizes;
  std::vector<std::vector<double>> preference;  // preference[a][b]: a toward b
  std::size_t tables = 10;
  int capacity = 12;
  double unseated_penalty = 1000.0;  // per person

  std::size_t groups() const { return group_sizes.size(); }

  static SeatingInstance random(Rng& rng, std::size_t groups = 50,
                                std::size_t tables = 10, int capacity = 12) {
    SeatingInstance inst;
    inst.tables = tables;
    inst.capacity = capacity;
    inst.group_sizes.resize(groups);
    for (auto& s : inst.group_sizes) s = static_cast<int>(rng.uniform_int(1, 3));
    inst.preference.assign(groups, std::vector<double>(groups, 0.0));
    for (std::size_t a = 0; a < groups; ++a) {
      for (std::size_t b = 0; b < groups; ++b) {
        if (a != b) inst.preference[a][b] = rng.uniform(-100.0, 100.0);
      }
    }
    return inst;
  }
};

/// table[g] for each group, or nullopt if the group could not be seated.
using SeatingAssignment = std::vector<std::optional<std::size_t>>;

/// Greedy decode: visit (group, table) parameters from high to low, seating a
/// group at a table when the group is unseated and the table has room. Equal
/// parameters are visited in (group, table) order.
inline SeatingAssignment decode_seating(const SeatingInstance& inst,
                                        std::span<const double> x) {
  const std::size_t G = inst.groups();
  const std::size_t T = inst.tables;
  if (x.size() != G * T) {
    throw DimensionError("seating: expected dimension " + std::to_string(G * T));
  }
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
  SeatingAssignment seat(G);
  std::vector<int> room(T, inst.capacity);
  std::size_t seated = 0;
  for (std::size_t k : order) {
    if (seated == G) break;
    const std::size_t g = k / T;
    const std::size_t t = k % T;
    if (seat[g] || room[t] < inst.group_sizes[g]) continue;
    seat[g] = t;
    room[t] -= inst.group_sizes[g];
    ++seated;
  }
  return seat;
}

/// Sum of directed preferences between co-seated groups, minus the per-person
/// penalty for unseated groups.
inline double score_seating(const SeatingInstance& inst,
                            const SeatingAssignment& seat) {
  const std::size_t G = inst.groups();
  double total = 0.0;
  for (std::size_t a = 0; a < G; ++a) {
    if (!seat[a]) {
      total -= inst.unseated_penalty * inst.group_sizes[a];
      continue;
    }
    for (std::size_t b = 0; b < G; ++b) {
      if (a != b && seat[b] && *seat[b] == *seat[a]) {
        total += inst.preference[a][b];
      }
    }
  }
  return total;
}

class SeatingProblem : public Problem {
 public:
  explicit SeatingProblem(SeatingInstance inst) : inst_(std::move(inst)) {}

  std::string_view name() const override { return "seating"; }
  std::size_t dimension() const override { return inst_.groups() * inst_.tables; }
  const SeatingInstance& instance() const { return inst_; }

  SeatingAssignment decode(std::span<const double> x) const {
    return decode_seating(inst_, x);
  }

  double true_score(std::span<const double> x) const override {
    check_dimension(x);
    return score_seating(inst_, decode(x));
  }

 private:
  SeatingInstance inst_;
};

}  // namespace deepopt

#endif  // DEEPOPT_PROBLEMS_SEATING_HPP
