// Plugging a user-defined objective into the library: any Problem subclass
// works with every search algorithm.

#include <cmath>
#include <cstdio>

#include "deepopt/ga.hpp"
#include "deepopt/local_search.hpp"
#include "deepopt/orchestrator.hpp"

namespace {

/// Negated distance to a hidden target point; the maximum is 0.
class TargetProblem : public deepopt::Problem {
 public:
  explicit TargetProblem(std::size_t dim) : target_(dim) {
    for (std::size_t i = 0; i < dim; ++i) target_[i] = 0.5 + 0.4 * std::sin(3.0 * i);
  }

  std::string_view name() const override { return "target"; }
  std::size_t dimension() const override { return target_.size(); }

  double true_score(std::span<const double> x) const override {
    check_dimension(x);
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d += std::fabs(x[i] - target_[i]);
    return -d;
  }

 private:
  std::vector<double> target_;
};

}  // namespace

int main() {
  using namespace deepopt;
  const TargetProblem problem(40);
  const std::uint64_t budget = 40000;

  BudgetAccountant b1(budget);
  Objective o1(problem, b1, rng_stream(5, Stream::noise));
  Rng nash_rng = rng_stream(5, Stream::nash);
  const double nash = nash_restarts(o1, NashConfig{}, nash_rng).best.raw_score;

  BudgetAccountant b2(budget);
  Objective o2(problem, b2, rng_stream(5, Stream::noise));
  Rng ga_rng = rng_stream(5, Stream::ga);
  const double ga = ga_restarts(o2, GaConfig{}, ga_rng).best.raw_score;

  BudgetAccountant b3(budget);
  Objective o3(problem, b3, rng_stream(5, Stream::noise));
  DeepOptConfig cfg;
  cfg.init_seed_points = 50;
  const double deep = deepopt_run(o3, cfg, 5).best.raw_score;

  std::printf("nash-v1 %.4f  ga %.4f  deep-opt-5 %.4f  (optimum 0)\n", nash, ga, deep);
  return 0;
}
