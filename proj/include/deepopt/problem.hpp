#ifndef DEEPOPT_PROBLEM_HPP
#define DEEPOPT_PROBLEM_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deepopt/core.hpp"

namespace deepopt {

/// An objective over the [0,1] genotype. Scores are always in maximization
/// sense; minimization problems convert at this boundary.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t dimension() const = 0;

  /// Noise-free score. Pure.
  virtual double true_score(std::span<const double> x) const = 0;

  /// What a search algorithm observes. Equal to true_score unless noisy.
  virtual double evaluate(std::span<const double> x, Rng& /*noise*/) const {
    return true_score(x);
  }

  virtual bool noisy() const { return false; }

  /// Binary-coded problems read genes through the 0.5 threshold.
  virtual bool binary() const { return false; }

  /// Optional score transform used only for reporting parity with published
  /// tables. Identity unless a problem overrides it.
  virtual double report_score(double score) const { return score; }

 protected:
  void check_dimension(std::span<const double> x) const {
    if (x.size() != dimension()) {
      throw DimensionError(std::string(name()) + ": expected dimension " +
                           std::to_string(dimension()) + ", got " +
                           std::to_string(x.size()));
    }
  }
};

/// Binds a problem to a budget. Every evaluation is charged exactly once.
/// Also keeps the harness-side record of the best true score seen, which the
/// search itself never reads.
class Objective {
 public:
  struct TracePoint {
    std::uint64_t eval_index;
    double best_so_far;
  };

  Objective(const Problem& problem, BudgetAccountant& budget, Rng noise)
      : problem_(&problem), budget_(&budget), noise_(std::move(noise)) {}

  const Problem& problem() const { return *problem_; }
  BudgetAccountant& budget() { return *budget_; }
  const BudgetAccountant& budget() const { return *budget_; }
  std::size_t dimension() const { return problem_->dimension(); }
  bool exhausted() const { return budget_->exhausted(); }

  double evaluate(const Candidate& x, Phase phase) {
    budget_->charge(phase);
    const double observed = problem_->evaluate(x.view(), noise_);
    const double truth =
        problem_->noisy() ? problem_->true_score(x.view()) : observed;
    if (!best_true_ || truth > *best_true_) {
      best_true_ = truth;
      best_true_solution_ = x;
      if (record_trace_) trace_.push_back({budget_->spent(), truth});
    }
    return observed;
  }

  std::optional<double> best_true() const { return best_true_; }
  const Candidate& best_true_solution() const { return best_true_solution_; }

  void set_record_trace(bool on) { record_trace_ = on; }
  const std::vector<TracePoint>& trace() const { return trace_; }

 private:
  const Problem* problem_;
  BudgetAccountant* budget_;
  Rng noise_;
  std::optional<double> best_true_;
  Candidate best_true_solution_;
  bool record_trace_ = true;
  std::vector<TracePoint> trace_;
};

}  // namespace deepopt

#endif  // DEEPOPT_PROBLEM_HPP
