#ifndef DEEPOPT_ADAM_HPP
#define DEEPOPT_ADAM_HPP

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

namespace deepopt {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First and second moment estimates for one parameter tensor.
template <typename Scalar>
struct AdamMoments {
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> m;
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> v;

  void reset(Eigen::Index rows, Eigen::Index cols) {
    m.setZero(rows, cols);
    v.setZero(rows, cols);
  }
};

/// In-place descent step: param -= lr * mhat / (sqrt(vhat) + eps). `step` is
/// the 1-based update count used for bias correction.
template <typename Scalar, typename Param, typename Grad>
void adam_step(Eigen::MatrixBase<Param>& param, const Eigen::MatrixBase<Grad>& grad,
               AdamMoments<Scalar>& mom, std::uint64_t step,
               const AdamConfig& cfg) {
  const Scalar b1 = static_cast<Scalar>(cfg.beta1);
  const Scalar b2 = static_cast<Scalar>(cfg.beta2);
  mom.m = b1 * mom.m + (Scalar(1) - b1) * grad.array();
  mom.v = b2 * mom.v + (Scalar(1) - b2) * grad.array().square();
  const Scalar c1 = Scalar(1) - static_cast<Scalar>(std::pow(cfg.beta1, step));
  const Scalar c2 = Scalar(1) - static_cast<Scalar>(std::pow(cfg.beta2, step));
  const Scalar lr = static_cast<Scalar>(cfg.learning_rate);
  const Scalar eps = static_cast<Scalar>(cfg.epsilon);
  param.derived().array() -= lr * (mom.m / c1) / ((mom.v / c2).sqrt() + eps);
}

}  // namespace deepopt

#endif  // DEEPOPT_ADAM_HPP
