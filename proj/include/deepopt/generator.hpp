#ifndef DEEPOPT_GENERATOR_HPP
#define DEEPOPT_GENERATOR_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "deepopt/adam.hpp"
#include "deepopt/core.hpp"
#include "deepopt/network.hpp"
#include "deepopt/trainer.hpp"

namespace deepopt {

struct GeneratorConfig {
  std::size_t batch_size = 50;
  double backdrive_fraction = 0.5;  // F
  AdamConfig inversion{};           // steps on the inputs
  std::size_t max_iterations = 500;
  double convergence_threshold = 1e-4;  // max per-gene change per iteration
  double target = 1.0;
  std::size_t discrete_sample_count = 200;
  double perturbation_scale = 0.05;
  // Scales the inversion step size of continuous back-driving. Values above 1
  // reproduce the "just raise the learning rate" alternative to discrete
  // generation.
  double learning_rate_multiplier = 1.0;

  void validate() const {
    if (batch_size == 0) throw Error("GeneratorConfig: batch_size must be >= 1");
    if (!(backdrive_fraction >= 0.0 && backdrive_fraction <= 1.0)) {
      throw Error("GeneratorConfig: backdrive_fraction must lie in [0, 1]");
    }
    if (discrete_sample_count == 0) {
      throw Error("GeneratorConfig: discrete_sample_count must be >= 1");
    }
    if (max_iterations == 0) throw Error("GeneratorConfig: max_iterations must be >= 1");
  }
};

/// Jittered copies of `best` (per-gene Uniform[-scale, scale], clipped), or a
/// uniform batch when there is no best yet.
inline std::vector<Candidate> seed_batch(const std::optional<Candidate>& best,
                                         std::size_t dim, const GeneratorConfig& cfg,
                                         Rng& rng) {
  std::vector<Candidate> batch;
  batch.reserve(cfg.batch_size);
  for (std::size_t i = 0; i < cfg.batch_size; ++i) {
    if (!best) {
      batch.push_back(Candidate::uniform(dim, rng));
      continue;
    }
    Candidate c = *best;
    for (auto& g : c) {
      g = clip01(g + rng.uniform(-cfg.perturbation_scale, cfg.perturbation_scale));
    }
    batch.push_back(std::move(c));
  }
  return batch;
}

struct BackdriveResult {
  Candidate solution;
  std::vector<double> predicted;  // model output before each step, then final
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

inline std::vector<Eigen::Index> active_columns(const std::vector<bool>& active) {
  std::vector<Eigen::Index> idx;
  for (std::size_t k = 0; k < active.size(); ++k) {
    if (active[k]) idx.push_back(static_cast<Eigen::Index>(k));
  }
  return idx;
}

}  // namespace detail

/// Gradient descent on the inputs of a frozen model toward the clamped target,
/// clipping to [0,1] after each step. Each start runs until its largest gene
/// change drops below the threshold or the iteration cap is reached.
inline std::vector<BackdriveResult> backdrive(const LandscapeModel& model,
                                              std::span<const Candidate> starts,
                                              const GeneratorConfig& cfg) {
  model.require_frozen();
  cfg.validate();
  const std::size_t dim = model.input_dim();
  const std::size_t k = starts.size();
  std::vector<BackdriveResult> results(k);
  if (k == 0) return results;
  Eigen::MatrixXd x = to_matrix(starts, dim);
  AdamMoments<double> mom;
  mom.reset(x.rows(), x.cols());
  AdamConfig adam = cfg.inversion;
  adam.learning_rate *= cfg.learning_rate_multiplier;
  std::vector<bool> active(k, true);

  for (std::size_t iter = 1; iter <= cfg.max_iterations; ++iter) {
    const auto idx = detail::active_columns(active);
    if (idx.empty()) break;
    Eigen::MatrixXd sub = x(Eigen::all, idx);
    LandscapeModel::RowVector out;
    const Eigen::MatrixXd grad = model.input_gradient(sub, &out, cfg.target);
    AdamMoments<double> sub_mom{mom.m(Eigen::all, idx), mom.v(Eigen::all, idx)};
    const Eigen::MatrixXd before = sub;
    adam_step(sub, grad, sub_mom, iter, adam);
    sub = sub.cwiseMax(0.0).cwiseMin(1.0);
    mom.m(Eigen::all, idx) = sub_mom.m;
    mom.v(Eigen::all, idx) = sub_mom.v;
    x(Eigen::all, idx) = sub;
    const Eigen::VectorXd change = (sub - before).cwiseAbs().colwise().maxCoeff();
    for (std::size_t j = 0; j < idx.size(); ++j) {
      auto& r = results[static_cast<std::size_t>(idx[j])];
      r.predicted.push_back(out(static_cast<Eigen::Index>(j)));
      r.iterations = iter;
      if (change(static_cast<Eigen::Index>(j)) < cfg.convergence_threshold) {
        r.converged = true;
        active[static_cast<std::size_t>(idx[j])] = false;
      }
    }
  }
  const auto final_out = model.predict(x);
  for (std::size_t j = 0; j < k; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = x(static_cast<Eigen::Index>(i), col);
    results[j].solution = Candidate(std::move(v));
    results[j].predicted.push_back(final_out(col));
  }
  return results;
}

inline BackdriveResult backdrive(const LandscapeModel& model, const Candidate& start,
                                 const GeneratorConfig& cfg) {
  return backdrive(model, std::span<const Candidate>(&start, 1), cfg).front();
}

struct GeneratedBatch {
  std::vector<Candidate> members;
  std::vector<bool> backdriven;
  std::vector<double> predicted_before;
  std::vector<double> predicted_after;
};

/// ⌊F·n⌋ distinct indices chosen uniformly, in ascending order.
inline std::vector<std::size_t> choose_subset(std::size_t n, double fraction, Rng& rng) {
  const auto count = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(all[i], all[i + rng.index(n - i)]);
  }
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

/// Seed a batch around `best`, then back-drive a random fraction F of it.
/// Members outside the subset are returned verbatim.
inline GeneratedBatch generate_batch(const LandscapeModel& model,
                                     const std::optional<Candidate>& best,
                                     const GeneratorConfig& cfg, Rng& rng) {
  model.require_frozen();
  GeneratedBatch out;
  out.members = seed_batch(best, model.input_dim(), cfg, rng);
  out.backdriven.assign(out.members.size(), false);
  const auto chosen = choose_subset(out.members.size(), cfg.backdrive_fraction, rng);
  std::vector<Candidate> starts;
  for (auto i : chosen) starts.push_back(out.members[i]);
  const auto driven = backdrive(model, starts, cfg);
  for (std::size_t j = 0; j < chosen.size(); ++j) {
    out.members[chosen[j]] = driven[j].solution;
    out.backdriven[chosen[j]] = true;
    out.predicted_before.push_back(driven[j].predicted.front());
    out.predicted_after.push_back(driven[j].predicted.back());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binary problems
// ---------------------------------------------------------------------------

inline Candidate binarize_threshold(const Candidate& p) {
  Candidate b(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) b[i] = p[i] > 0.5 ? 1.0 : 0.0;
  return b;
}

inline Candidate binarize_sample(const Candidate& p, Rng& rng) {
  Candidate b(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) b[i] = rng.bernoulli(p[i]) ? 1.0 : 0.0;
  return b;
}

struct DiscreteResult {
  Candidate probabilities;
  std::vector<double> mean_predicted;  // mean model output over each iteration's strings
  std::size_t iterations = 0;
  bool converged = false;
};

/// Treats each gene as a Bernoulli mean. Every iteration samples
/// `discrete_sample_count` binary strings per probability vector, back-
/// propagates the clamped-target error of each string to its inputs, averages
/// those gradients, and takes one Adam step on the probabilities. No true
/// evaluations happen here. The sampled passes run in single precision: they
/// dominate the cost and only steer a noisy estimate.
inline std::vector<DiscreteResult> discrete_generate(const LandscapeModel& model,
                                                     std::span<const Candidate> probs,
                                                     const GeneratorConfig& cfg,
                                                     Rng& rng) {
  model.require_frozen();
  cfg.validate();
  const std::size_t dim = model.input_dim();
  const std::size_t k = probs.size();
  const std::size_t s = cfg.discrete_sample_count;
  std::vector<DiscreteResult> results(k);
  if (k == 0) return results;
  Eigen::MatrixXd p = to_matrix(probs, dim);
  AdamMoments<double> mom;
  mom.reset(p.rows(), p.cols());
  std::vector<bool> active(k, true);
  const auto fmodel = model.cast<float>();
  Eigen::MatrixXf strings;
  Eigen::MatrixXf g;
  BasicLandscapeModel<float>::Workspace ws;

  for (std::size_t iter = 1; iter <= cfg.max_iterations; ++iter) {
    const auto idx = detail::active_columns(active);
    if (idx.empty()) break;
    const auto na = static_cast<Eigen::Index>(idx.size());
    strings.resize(p.rows(), na * static_cast<Eigen::Index>(s));
    for (Eigen::Index j = 0; j < na; ++j) {
      // Bit set when a 32-bit uniform falls below p * 2^32; two draws per
      // engine call, no branches.
      std::vector<std::uint64_t> cut(static_cast<std::size_t>(p.rows()));
      for (Eigen::Index i = 0; i < p.rows(); ++i) {
        cut[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(
            std::ldexp(p(i, idx[static_cast<std::size_t>(j)]), 32));
      }
      for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(s); ++c) {
        float* col = strings.col(j * static_cast<Eigen::Index>(s) + c).data();
        const std::size_t rows = cut.size();
        for (std::size_t i = 0; i < rows; i += 2) {
          const std::uint64_t u = rng.next_u64();
          col[i] = static_cast<float>((u & 0xffffffffU) < cut[i]);
          if (i + 1 < rows) col[i + 1] = static_cast<float>((u >> 32) < cut[i + 1]);
        }
      }
    }
    Eigen::RowVectorXf out;
    fmodel.input_gradient(strings, g, ws, &out, cfg.target);
    Eigen::MatrixXd grad(p.rows(), na);
    for (Eigen::Index j = 0; j < na; ++j) {
      const auto block = g.middleCols(j * static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
      grad.col(j) = block.rowwise().mean().cast<double>();
      results[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])]
          .mean_predicted.push_back(
              static_cast<double>(out.segment(j * static_cast<Eigen::Index>(s),
                                              static_cast<Eigen::Index>(s))
                                      .mean()));
    }
    Eigen::MatrixXd sub = p(Eigen::all, idx);
    AdamMoments<double> sub_mom{mom.m(Eigen::all, idx), mom.v(Eigen::all, idx)};
    const Eigen::MatrixXd before = sub;
    adam_step(sub, grad, sub_mom, iter, cfg.inversion);
    sub = sub.cwiseMax(0.0).cwiseMin(1.0);
    mom.m(Eigen::all, idx) = sub_mom.m;
    mom.v(Eigen::all, idx) = sub_mom.v;
    p(Eigen::all, idx) = sub;
    const Eigen::VectorXd change = (sub - before).cwiseAbs().colwise().maxCoeff();
    for (std::size_t j = 0; j < idx.size(); ++j) {
      auto& r = results[static_cast<std::size_t>(idx[j])];
      r.iterations = iter;
      if (change(static_cast<Eigen::Index>(j)) < cfg.convergence_threshold) {
        r.converged = true;
        active[static_cast<std::size_t>(idx[j])] = false;
      }
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      v[i] = p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    results[j].probabilities = Candidate(std::move(v));
  }
  return results;
}

inline DiscreteResult discrete_generate(const LandscapeModel& model, const Candidate& p,
                                        const GeneratorConfig& cfg, Rng& rng) {
  return discrete_generate(model, std::span<const Candidate>(&p, 1), cfg, rng).front();
}

/// Discrete counterpart of generate_batch: probability vectors seeded around
/// the best's bits, a fraction F refined by discrete_generate, and every
/// member sampled to a binary string.
inline GeneratedBatch generate_discrete_batch(const LandscapeModel& model,
                                              const std::optional<Candidate>& best,
                                              const GeneratorConfig& cfg, Rng& rng) {
  model.require_frozen();
  std::optional<Candidate> center;
  if (best) center = binarize_threshold(*best);
  std::vector<Candidate> probs = seed_batch(center, model.input_dim(), cfg, rng);
  GeneratedBatch out;
  out.backdriven.assign(probs.size(), false);
  const auto chosen = choose_subset(probs.size(), cfg.backdrive_fraction, rng);
  std::vector<Candidate> starts;
  for (auto i : chosen) starts.push_back(probs[i]);
  const auto refined = discrete_generate(model, starts, cfg, rng);
  for (std::size_t j = 0; j < chosen.size(); ++j) {
    probs[chosen[j]] = refined[j].probabilities;
    out.backdriven[chosen[j]] = true;
    if (!refined[j].mean_predicted.empty()) {
      out.predicted_before.push_back(refined[j].mean_predicted.front());
      out.predicted_after.push_back(refined[j].mean_predicted.back());
    }
  }
  out.members.reserve(probs.size());
  for (const auto& p : probs) out.members.push_back(binarize_sample(p, rng));
  return out;
}

}  // namespace deepopt

#endif  // DEEPOPT_GENERATOR_HPP
