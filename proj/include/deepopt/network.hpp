#ifndef DEEPOPT_NETWORK_HPP
#define DEEPOPT_NETWORK_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "deepopt/adam.hpp"
#include "deepopt/core.hpp"

namespace deepopt {

enum class Architecture : std::uint32_t { deep5 = 5, deep10 = 10, custom = 0 };

inline std::string_view to_string(Architecture a) {
  switch (a) {
    case Architecture::deep5: return "deep5";
    case Architecture::deep10: return "deep10";
    case Architecture::custom: return "custom";
  }
  return "unknown";
}

/// Layer widths and wiring of a fully connected regressor with one sigmoid
/// output. With dense_skip, every layer (including the output) reads the
/// concatenation of the raw input and all earlier hidden activations.
struct NetworkSpec {
  Architecture architecture = Architecture::deep5;
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden;
  bool dense_skip = false;

  static NetworkSpec deep5(std::size_t input_dim) {
    return {Architecture::deep5, input_dim, std::vector<std::size_t>(5, 100), false};
  }
  static NetworkSpec deep10(std::size_t input_dim) {
    return {Architecture::deep10, input_dim, std::vector<std::size_t>(10, 20), true};
  }
  static NetworkSpec of(Architecture a, std::size_t input_dim) {
    if (a == Architecture::deep10) return deep10(input_dim);
    return deep5(input_dim);
  }

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

class FrozenModelError : public Error {
 public:
  using Error::Error;
};

/// Feed-forward landscape model: rectifier hidden units, sigmoid output.
/// Activations are laid out column-per-sample in one stacked matrix
/// [input; h1; h2; ...] so both wirings share the same forward/backward code.
template <typename Scalar>
class BasicLandscapeModel {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  struct Layer {
    Matrix weight;  // out x in
    Vector bias;
    Eigen::Index in_begin = 0;  // rows of the activation stack read
    Eigen::Index in_end = 0;
    Eigen::Index out_begin = 0;  // rows written (hidden layers only)
  };

  struct Gradients {
    std::vector<Matrix> weight;
    std::vector<Vector> bias;
  };

  /// Activations of one forward pass, kept for backpropagation.
  struct Tape {
    Matrix stack;
    RowVector output;
  };

  /// Reusable buffers for repeated passes over same-sized batches.
  struct Workspace {
    Tape tape;
    Matrix d_stack;
    Matrix dpre;
  };

  BasicLandscapeModel() = default;

  explicit BasicLandscapeModel(NetworkSpec spec) : spec_(std::move(spec)) {
    if (spec_.input_dim == 0) throw Error("network: input_dim must be positive");
    Eigen::Index rows = static_cast<Eigen::Index>(spec_.input_dim);
    Eigen::Index prev_begin = 0;
    for (std::size_t width : spec_.hidden) {
      Layer l;
      l.in_begin = spec_.dense_skip ? 0 : prev_begin;
      l.in_end = rows;
      l.out_begin = rows;
      l.weight = Matrix::Zero(static_cast<Eigen::Index>(width), l.in_end - l.in_begin);
      l.bias = Vector::Zero(static_cast<Eigen::Index>(width));
      layers_.push_back(std::move(l));
      prev_begin = rows;
      rows += static_cast<Eigen::Index>(width);
    }
    Layer out;
    out.in_begin = spec_.dense_skip ? 0 : prev_begin;
    out.in_end = rows;
    out.out_begin = rows;
    out.weight = Matrix::Zero(1, out.in_end - out.in_begin);
    out.bias = Vector::Zero(1);
    layers_.push_back(std::move(out));
    stack_rows_ = rows;
  }

  const NetworkSpec& spec() const { return spec_; }
  std::size_t input_dim() const { return spec_.input_dim; }
  std::size_t layer_count() const { return layers_.size(); }
  const Layer& layer(std::size_t i) const { return layers_[i]; }

  Layer& mutable_layer(std::size_t i) {
    require_unfrozen();
    return layers_[i];
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
    return n;
  }

  bool frozen() const { return frozen_; }
  void freeze() { frozen_ = true; }
  void unfreeze() { frozen_ = false; }

  /// Same network at another precision; keeps the frozen flag.
  template <typename To>
  BasicLandscapeModel<To> cast() const {
    BasicLandscapeModel<To> m(spec_);
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      auto& l = m.mutable_layer(i);
      l.weight = layers_[i].weight.template cast<To>();
      l.bias = layers_[i].bias.template cast<To>();
    }
    if (frozen_) m.freeze();
    return m;
  }

  /// He-normal hidden weights, scaled-normal output weights, zero biases.
  void initialize(Rng& rng) {
    require_unfrozen();
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      auto& l = layers_[i];
      const bool output = i + 1 == layers_.size();
      const double fan_in = static_cast<double>(l.weight.cols());
      const double sd = std::sqrt((output ? 1.0 : 2.0) / fan_in);
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
          l.weight(r, c) = static_cast<Scalar>(sd * rng.normal());
        }
      }
      l.bias.setZero();
    }
  }

  void zero_weights() {
    require_unfrozen();
    for (auto& l : layers_) {
      l.weight.setZero();
      l.bias.setZero();
    }
  }

  /// Inputs are columns of `x` (input_dim x batch).
  template <typename Derived>
  void forward(const Eigen::MatrixBase<Derived>& x, Tape& tape) const {
    if (x.rows() != static_cast<Eigen::Index>(spec_.input_dim)) {
      throw DimensionError("network: input has " + std::to_string(x.rows()) +
                           " rows, expected " + std::to_string(spec_.input_dim));
    }
    const Eigen::Index batch = x.cols();
    tape.stack.resize(stack_rows_, batch);
    tape.stack.topRows(x.rows()) = x.template cast<Scalar>();
    for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
      const auto& l = layers_[i];
      auto out = tape.stack.middleRows(l.out_begin, l.weight.rows());
      out.noalias() = l.weight * tape.stack.middleRows(l.in_begin, l.in_end - l.in_begin);
      out.colwise() += l.bias;
      out = out.cwiseMax(Scalar(0));
    }
    const auto& o = layers_.back();
    RowVector z = o.weight * tape.stack.middleRows(o.in_begin, o.in_end - o.in_begin);
    z.array() += o.bias(0);
    tape.output = (Scalar(1) / (Scalar(1) + (-z.array()).exp())).matrix();
  }

  template <typename Derived>
  RowVector predict(const Eigen::MatrixBase<Derived>& x) const {
    Tape tape;
    forward(x, tape);
    return tape.output;
  }

  double predict(std::span<const double> x) const {
    Eigen::Map<const Eigen::VectorXd> col(x.data(), static_cast<Eigen::Index>(x.size()));
    return static_cast<double>(predict(col)(0));
  }

  double predict(const Candidate& x) const { return predict(x.view()); }

  /// Backpropagates d(loss)/d(output) for every column of the taped batch.
  /// Fills weight gradients when `grads` is given and input gradients when
  /// `input_grad` is given.
  void backward(const Tape& tape, const RowVector& d_output, Gradients* grads,
                Matrix* input_grad, Workspace* ws = nullptr) const {
    const Eigen::Index batch = tape.stack.cols();
    Workspace local;
    Workspace& w = ws ? *ws : local;
    Matrix& d_stack = w.d_stack;
    d_stack.setZero(stack_rows_, batch);
    if (grads) {
      grads->weight.resize(layers_.size());
      grads->bias.resize(layers_.size());
    }
    // Output unit: sigmoid derivative.
    RowVector dz = (d_output.array() * tape.output.array() *
                    (Scalar(1) - tape.output.array())).matrix();
    {
      const auto& o = layers_.back();
      const auto in = tape.stack.middleRows(o.in_begin, o.in_end - o.in_begin);
      if (grads) {
        grads->weight.back().noalias() = dz * in.transpose();
        grads->bias.back() = Vector::Constant(1, dz.sum());
      }
      d_stack.middleRows(o.in_begin, o.in_end - o.in_begin).noalias() +=
          o.weight.transpose() * dz;
    }
    for (std::size_t i = layers_.size() - 1; i-- > 0;) {
      const auto& l = layers_[i];
      const Eigen::Index width = l.weight.rows();
      Matrix& dpre = w.dpre;
      dpre = (d_stack.middleRows(l.out_begin, width).array() *
              (tape.stack.middleRows(l.out_begin, width).array() > Scalar(0))
                  .template cast<Scalar>())
                 .matrix();
      const auto in = tape.stack.middleRows(l.in_begin, l.in_end - l.in_begin);
      if (grads) {
        grads->weight[i].noalias() = dpre * in.transpose();
        grads->bias[i] = dpre.rowwise().sum();
      }
      // Gradients flowing into the raw input rows are only needed on request.
      const Eigen::Index first =
          input_grad ? l.in_begin
                     : std::max(l.in_begin, static_cast<Eigen::Index>(spec_.input_dim));
      if (first < l.in_end) {
        d_stack.middleRows(first, l.in_end - first).noalias() +=
            l.weight.middleCols(first - l.in_begin, l.in_end - first).transpose() * dpre;
      }
    }
    if (input_grad) {
      *input_grad = d_stack.topRows(static_cast<Eigen::Index>(spec_.input_dim));
    }
  }

  /// Mean squared error of predictions against targets, with weight
  /// gradients of that loss.
  template <typename Derived>
  double loss_and_gradients(const Eigen::MatrixBase<Derived>& x,
                            const RowVector& target, Gradients& grads) const {
    Tape tape;
    forward(x, tape);
    const RowVector diff = tape.output - target;
    const Scalar n = static_cast<Scalar>(x.cols());
    backward(tape, (Scalar(2) / n) * diff, &grads, nullptr);
    return static_cast<double>(diff.squaredNorm() / n);
  }

  template <typename Derived>
  double loss(const Eigen::MatrixBase<Derived>& x, const RowVector& target) const {
    const RowVector diff = predict(x) - target;
    return static_cast<double>(diff.squaredNorm() / static_cast<Scalar>(x.cols()));
  }

  /// Gradient of E = (target - output)^2 with respect to each input column.
  /// Only defined on a frozen model.
  template <typename Derived>
  Matrix input_gradient(const Eigen::MatrixBase<Derived>& x, RowVector* output = nullptr,
                        double target = 1.0) const {
    Workspace ws;
    Matrix grad;
    input_gradient(x, grad, ws, output, target);
    return grad;
  }

  template <typename Derived>
  void input_gradient(const Eigen::MatrixBase<Derived>& x, Matrix& grad, Workspace& ws,
                      RowVector* output = nullptr, double target = 1.0) const {
    require_frozen();
    forward(x, ws.tape);
    const RowVector d_output =
        (Scalar(-2) * (static_cast<Scalar>(target) - ws.tape.output.array())).matrix();
    backward(ws.tape, d_output, nullptr, &grad, &ws);
    if (output) *output = ws.tape.output;
  }

  std::vector<double> input_gradient(const Candidate& x, double target = 1.0) const {
    Eigen::Map<const Eigen::VectorXd> col(x.view().data(),
                                          static_cast<Eigen::Index>(x.size()));
    const Matrix g = input_gradient(col, nullptr, target);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i] = static_cast<double>(g(static_cast<Eigen::Index>(i), 0));
    }
    return out;
  }

  /// Multiplies every weight matrix (not the biases) by `factor`.
  void decay_weights(double factor) {
    require_unfrozen();
    for (auto& l : layers_) l.weight *= static_cast<Scalar>(factor);
  }

  /// FNV-1a over the raw parameter bytes.
  std::uint64_t checksum() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const Scalar* data, Eigen::Index n) {
      const auto* bytes = reinterpret_cast<const unsigned char*>(data);
      for (std::size_t i = 0; i < static_cast<std::size_t>(n) * sizeof(Scalar); ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
      }
    };
    for (const auto& l : layers_) {
      mix(l.weight.data(), l.weight.size());
      mix(l.bias.data(), l.bias.size());
    }
    return h;
  }

  // Weight snapshot: "DOPTNET1", spec header, then per layer rows, cols,
  // row-major weights, bias. All integers little-endian u64, reals f64.
  void save(std::ostream& out) const {
    out.write("DOPTNET1", 8);
    auto put_u64 = [&out](std::uint64_t v) {
      unsigned char b[8];
      for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
      out.write(reinterpret_cast<const char*>(b), 8);
    };
    auto put_f64 = [&](double v) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, 8);
      put_u64(bits);
    };
    put_u64(static_cast<std::uint64_t>(spec_.architecture));
    put_u64(spec_.input_dim);
    put_u64(spec_.dense_skip ? 1 : 0);
    put_u64(spec_.hidden.size());
    for (auto w : spec_.hidden) put_u64(w);
    for (const auto& l : layers_) {
      put_u64(static_cast<std::uint64_t>(l.weight.rows()));
      put_u64(static_cast<std::uint64_t>(l.weight.cols()));
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
          put_f64(static_cast<double>(l.weight(r, c)));
        }
      }
      for (Eigen::Index r = 0; r < l.bias.size(); ++r) {
        put_f64(static_cast<double>(l.bias(r)));
      }
    }
  }

  static BasicLandscapeModel load(std::istream& in) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string_view(magic, 8) != "DOPTNET1") {
      throw Error("network snapshot: bad magic");
    }
    auto get_u64 = [&in]() {
      unsigned char b[8];
      in.read(reinterpret_cast<char*>(b), 8);
      if (!in) throw Error("network snapshot: truncated");
      std::uint64_t v = 0;
      for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
      return v;
    };
    auto get_f64 = [&]() {
      const std::uint64_t bits = get_u64();
      double v;
      std::memcpy(&v, &bits, 8);
      return v;
    };
    NetworkSpec spec;
    spec.architecture = static_cast<Architecture>(get_u64());
    spec.input_dim = get_u64();
    spec.dense_skip = get_u64() != 0;
    const std::uint64_t n_hidden = get_u64();
    if (n_hidden > 4096) throw Error("network snapshot: implausible layer count");
    for (std::uint64_t i = 0; i < n_hidden; ++i) spec.hidden.push_back(get_u64());
    BasicLandscapeModel model(spec);
    for (auto& l : model.layers_) {
      const auto rows = static_cast<Eigen::Index>(get_u64());
      const auto cols = static_cast<Eigen::Index>(get_u64());
      if (rows != l.weight.rows() || cols != l.weight.cols()) {
        throw Error("network snapshot: layer shape mismatch");
      }
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
          l.weight(r, c) = static_cast<Scalar>(get_f64());
        }
      }
      for (Eigen::Index r = 0; r < l.bias.size(); ++r) {
        l.bias(r) = static_cast<Scalar>(get_f64());
      }
    }
    return model;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write network snapshot: " + path);
    save(out);
  }

  static BasicLandscapeModel load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read network snapshot: " + path);
    return load(in);
  }

  void require_frozen() const {
    if (!frozen_) throw FrozenModelError("operation requires a frozen model");
  }
  void require_unfrozen() const {
    if (frozen_) throw FrozenModelError("model is frozen; weights are read-only");
  }

 private:
  NetworkSpec spec_;
  std::vector<Layer> layers_;
  Eigen::Index stack_rows_ = 0;
  bool frozen_ = false;
};

using LandscapeModel = BasicLandscapeModel<double>;

/// Single-column prediction.
template <typename Scalar>
double forward(const BasicLandscapeModel<Scalar>& model, const Candidate& x) {
  if (x.size() != model.input_dim()) {
    throw DimensionError("forward: candidate dimension mismatch");
  }
  return model.predict(x);
}

}  // namespace deepopt

#endif  // DEEPOPT_NETWORK_HPP
