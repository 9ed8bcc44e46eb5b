#ifndef DEEPOPT_TRAINER_HPP
#define DEEPOPT_TRAINER_HPP

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "deepopt/adam.hpp"
#include "deepopt/core.hpp"
#include "deepopt/network.hpp"
#include "deepopt/problem.hpp"

namespace deepopt {

/// How genotypes are presented to the model. Binary view feeds thresholded
/// bits, matching the Bernoulli strings used by discrete generation.
enum class InputView { raw, binary };

inline double view_value(double gene, InputView view) {
  return view == InputView::binary ? (gene > 0.5 ? 1.0 : 0.0) : gene;
}

inline Eigen::MatrixXd to_matrix(std::span<const Candidate> xs, std::size_t dim,
                                 InputView view = InputView::raw) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(xs.size()));
  for (std::size_t j = 0; j < xs.size(); ++j) {
    if (xs[j].size() != dim) throw DimensionError("to_matrix: dimension mismatch");
    for (std::size_t i = 0; i < dim; ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          view_value(xs[j][i], view);
    }
  }
  return m;
}

/// Pearson correlation; nullopt when either side has fewer than two distinct
/// values.
inline std::optional<double> pearson(std::span<const double> a,
                                     std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) return std::nullopt;
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
  return sab / std::sqrt(saa * sbb);
}

struct TrainConfig {
  double weight_decay_factor = 0.98;  // multiplies weights once per epoch
  AdamConfig adam{};
  std::size_t batch_size = 64;
  std::size_t max_epochs = 200;
  std::size_t min_epochs = 3;
  std::size_t validation_size = 100;
  double validation_perturbation = 0.05;
  double correlation_drop = 0.01;
  std::size_t patience = 3;
  std::size_t max_restarts = 3;
  bool restore_best = true;

  void validate() const {
    if (!(weight_decay_factor > 0.0 && weight_decay_factor <= 1.0)) {
      throw Error("TrainConfig: weight_decay_factor must lie in (0, 1]");
    }
    if (batch_size == 0 || max_epochs == 0 || patience == 0) {
      throw Error("TrainConfig: batch_size, max_epochs and patience must be positive");
    }
    if (validation_size < 2) throw Error("TrainConfig: validation_size must be >= 2");
    if (!(adam.learning_rate > 0.0)) throw Error("TrainConfig: learning rate must be positive");
  }
};

enum class StopReason {
  correlation_decrease,
  max_epochs,
  degenerate_correlation,
  no_validation,
};

inline std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::correlation_decrease: return "correlation-decrease";
    case StopReason::max_epochs: return "max-epochs";
    case StopReason::degenerate_correlation: return "degenerate-correlation";
    case StopReason::no_validation: return "no-validation";
  }
  return "unknown";
}

struct TrainReport {
  StopReason stop_reason = StopReason::max_epochs;
  std::size_t epochs = 0;  // across all restarts
  std::size_t restarts = 0;
  std::vector<double> correlations;  // per epoch, degenerate recorded as 0
  double final_correlation = 0.0;
  double final_loss = 0.0;
  bool fresh_validation = false;
};

/// Validation data: inputs already in model view and their true evaluations.
struct ValidationSet {
  Eigen::MatrixXd inputs;
  std::vector<double> scores;
  bool empty() const { return scores.empty(); }
};

/// Owns the landscape model and its optimizer state across cycles.
class ModelTrainer {
 public:
  using Model = LandscapeModel;

  ModelTrainer(NetworkSpec spec, TrainConfig cfg, Rng rng)
      : model_(std::move(spec)), cfg_(cfg), rng_(std::move(rng)) {
    cfg_.validate();
    reinitialize();
  }

  Model& model() { return model_; }
  const Model& model() const { return model_; }
  const TrainConfig& config() const { return cfg_; }
  const ValidationSet& validation() const { return validation_; }

  void reinitialize() {
    model_.unfreeze();
    model_.initialize(rng_);
    reset_optimizer();
  }

  /// One training cycle on the pool: scale scores, draw and evaluate a fresh
  /// validation set around `best`, fit with validation-correlation stopping.
  /// Leaves the model frozen.
  TrainReport train_cycle(const SamplePool& pool, const ScalingConfig& scaling,
                          const EvaluatedSample& best, Objective& objective,
                          InputView view = InputView::raw) {
    if (pool.empty()) throw Error("train_cycle: empty pool");
    const std::size_t dim = model_.input_dim();
    std::vector<Candidate> xs;
    xs.reserve(pool.size());
    for (const auto& e : pool) xs.push_back(e.solution);
    const Eigen::MatrixXd inputs = to_matrix(xs, dim, view);
    const std::vector<double> targets = scale_scores(pool, scaling);

    bool fresh = false;
    if (objective.budget().can_afford(cfg_.validation_size)) {
      std::vector<Candidate> vx;
      ValidationSet vs;
      vx.reserve(cfg_.validation_size);
      for (std::size_t i = 0; i < cfg_.validation_size; ++i) {
        Candidate c = best.solution;
        for (auto& g : c) {
          g = clip01(g + rng_.uniform(-cfg_.validation_perturbation,
                                      cfg_.validation_perturbation));
        }
        vs.scores.push_back(objective.evaluate(c, Phase::validation));
        vx.push_back(std::move(c));
      }
      vs.inputs = to_matrix(vx, dim, view);
      validation_ = std::move(vs);
      fresh = true;
    }
    TrainReport report = fit(inputs, targets, validation_);
    report.fresh_validation = fresh;
    return report;
  }

  /// Fits the model to (inputs, targets) with early stopping on `validation`.
  /// An empty validation set trains for min_epochs.
  TrainReport fit(const Eigen::MatrixXd& inputs, std::span<const double> targets,
                  const ValidationSet& validation) {
    if (static_cast<std::size_t>(inputs.cols()) != targets.size()) {
      throw Error("fit: inputs and targets differ in length");
    }
    model_.unfreeze();
    TrainReport report;
    const Eigen::Index n = inputs.cols();
    Model::RowVector target_row(n);
    for (Eigen::Index i = 0; i < n; ++i) target_row(i) = targets[static_cast<std::size_t>(i)];

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    auto run_epoch = [&]() {
      rng_.shuffle(order);
      const auto bs = static_cast<Eigen::Index>(cfg_.batch_size);
      Eigen::MatrixXd xb;
      Model::RowVector tb;
      for (Eigen::Index start = 0; start < n; start += bs) {
        const Eigen::Index len = std::min(bs, n - start);
        xb.resize(inputs.rows(), len);
        tb.resize(len);
        for (Eigen::Index j = 0; j < len; ++j) {
          const Eigen::Index src = order[static_cast<std::size_t>(start + j)];
          xb.col(j) = inputs.col(src);
          tb(j) = target_row(src);
        }
        step(xb, tb);
      }
      if (cfg_.weight_decay_factor != 1.0) model_.decay_weights(cfg_.weight_decay_factor);
    };

    if (validation.empty()) {
      for (std::size_t e = 0; e < cfg_.min_epochs; ++e) {
        run_epoch();
        ++report.epochs;
      }
      report.stop_reason = StopReason::no_validation;
      report.final_loss = model_.loss(inputs, target_row);
      model_.freeze();
      return report;
    }

    double best_corr = -std::numeric_limits<double>::infinity();
    std::optional<Model> best_model;
    std::size_t attempt_epoch = 0;
    std::size_t below = 0;
    report.stop_reason = StopReason::max_epochs;
    for (std::size_t epoch = 0; epoch < cfg_.max_epochs; ++epoch) {
      run_epoch();
      ++report.epochs;
      ++attempt_epoch;
      const auto predicted = model_.predict(validation.inputs);
      std::vector<double> pred(predicted.data(), predicted.data() + predicted.size());
      const auto corr = pearson(pred, validation.scores);
      const double c = corr.value_or(0.0);
      report.correlations.push_back(c);
      report.final_correlation = c;

      if (attempt_epoch == 1 && corr && c < 0.0 && report.restarts < cfg_.max_restarts) {
        ++report.restarts;
        reinitialize();
        attempt_epoch = 0;
        below = 0;
        best_corr = -std::numeric_limits<double>::infinity();
        best_model.reset();
        continue;
      }
      if (!corr) {
        if (attempt_epoch >= cfg_.min_epochs) {
          report.stop_reason = StopReason::degenerate_correlation;
          break;
        }
        continue;
      }
      if (c > best_corr) {
        best_corr = c;
        if (cfg_.restore_best) best_model = model_;
      }
      below = (c < best_corr - cfg_.correlation_drop) ? below + 1 : 0;
      if (below >= cfg_.patience && attempt_epoch >= cfg_.min_epochs) {
        report.stop_reason = StopReason::correlation_decrease;
        break;
      }
    }
    if (best_model && report.stop_reason == StopReason::correlation_decrease) {
      model_ = std::move(*best_model);
      report.final_correlation = best_corr;
    }
    report.final_loss = model_.loss(inputs, target_row);
    model_.freeze();
    return report;
  }

  /// One optimizer step on a minibatch; returns the batch loss before the step.
  double step(const Eigen::MatrixXd& x, const Model::RowVector& target) {
    model_.require_unfrozen();
    const double loss = model_.loss_and_gradients(x, target, grads_);
    ++step_count_;
    for (std::size_t i = 0; i < model_.layer_count(); ++i) {
      auto& layer = model_.mutable_layer(i);
      adam_step(layer.weight, grads_.weight[i], weight_moments_[i], step_count_, cfg_.adam);
      adam_step(layer.bias, grads_.bias[i], bias_moments_[i], step_count_, cfg_.adam);
    }
    return loss;
  }

 private:
  void reset_optimizer() {
    step_count_ = 0;
    weight_moments_.assign(model_.layer_count(), {});
    bias_moments_.assign(model_.layer_count(), {});
    for (std::size_t i = 0; i < model_.layer_count(); ++i) {
      const auto& l = model_.layer(i);
      weight_moments_[i].reset(l.weight.rows(), l.weight.cols());
      bias_moments_[i].reset(l.bias.rows(), 1);
    }
  }

  Model model_;
  TrainConfig cfg_;
  Rng rng_;
  ValidationSet validation_;
  Model::Gradients grads_;
  std::vector<AdamMoments<double>> weight_moments_;
  std::vector<AdamMoments<double>> bias_moments_;
  std::uint64_t step_count_ = 0;
};

}  // namespace deepopt

#endif  // DEEPOPT_TRAINER_HPP
