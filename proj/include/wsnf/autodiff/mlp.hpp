#ifndef WSNF_AUTODIFF_MLP_HPP
#define WSNF_AUTODIFF_MLP_HPP

#include "wsnf/autodiff/ops.hpp"
#include "wsnf/core/rng.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace wsnf::ad {

enum class Activation { Identity, LeakyRelu, Tanh };

struct MlpShape {
  Index input = 0;
  std::vector<Index> hidden{128, 128};
  Index output = 0;
  Activation activation = Activation::LeakyRelu;
  Activation final_activation = Activation::Identity;
  double slope = 0.01;
};

/// Dense feed-forward network. The object only describes the architecture;
/// weights live in a ParamStore under `<prefix>.w<k>` (in x out) and
/// `<prefix>.b<k>` (1 x out).
template <typename Scalar>
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::string prefix, MlpShape shape) : prefix_(std::move(prefix)), shape_(std::move(shape)) {
    dims_.push_back(shape_.input);
    for (Index h : shape_.hidden) dims_.push_back(h);
    dims_.push_back(shape_.output);
    for (Index d : dims_) {
      if (d < 0) throw ShapeError("negative layer width");
    }
  }

  const std::string& prefix() const { return prefix_; }
  const MlpShape& shape() const { return shape_; }
  std::size_t num_layers() const { return dims_.size() - 1; }

  std::string weight_name(std::size_t k) const { return prefix_ + ".w" + std::to_string(k); }
  std::string bias_name(std::size_t k) const { return prefix_ + ".b" + std::to_string(k); }

  /// Sum over layers of (in + 1) * out.
  Index parameter_count() const {
    Index n = 0;
    for (std::size_t k = 0; k + 1 < dims_.size(); ++k) n += (dims_[k] + 1) * dims_[k + 1];
    return n;
  }

  /// Uniform(-1/sqrt(in), 1/sqrt(in)) weights and biases. With
  /// `zero_last` the output layer starts at zero.
  void init(ParamStore<Scalar>& params, Rng& rng, bool zero_last = false) const {
    for (std::size_t k = 0; k + 1 < dims_.size(); ++k) {
      const Index in = dims_[k], out = dims_[k + 1];
      const bool zero = zero_last && k + 2 == dims_.size();
      const double bound = in > 0 ? 1.0 / std::sqrt(static_cast<double>(in)) : 1.0;
      Matrix<Scalar> w(in, out), b(1, out);
      for (Index i = 0; i < w.size(); ++i) w.data()[i] = zero ? Scalar(0) : Scalar(rng.uniform(-bound, bound));
      for (Index i = 0; i < b.size(); ++i) b.data()[i] = zero ? Scalar(0) : Scalar(rng.uniform(-bound, bound));
      params.add(weight_name(k), std::move(w));
      params.add(bias_name(k), std::move(b));
    }
  }

  Var<Scalar> forward(Tape<Scalar>& tape, const Var<Scalar>& x) const {
    if (x.cols() != shape_.input) {
      throw ShapeError(prefix_ + ": input width " + std::to_string(x.cols()) + ", expected " +
                       std::to_string(shape_.input));
    }
    Var<Scalar> h = x;
    for (std::size_t k = 0; k + 1 < dims_.size(); ++k) {
      h = add_row(matmul(h, tape.param(weight_name(k))), tape.param(bias_name(k)));
      const bool last = k + 2 == dims_.size();
      h = activate(h, last ? shape_.final_activation : shape_.activation);
    }
    return h;
  }

  /// Evaluation without gradients.
  Matrix<Scalar> operator()(const ParamStore<Scalar>& params, const Matrix<Scalar>& x) const {
    Tape<Scalar> tape(params, Tape<Scalar>::no_grad);
    return forward(tape, tape.constant(x)).value();
  }

 private:
  Var<Scalar> activate(const Var<Scalar>& h, Activation a) const {
    switch (a) {
      case Activation::LeakyRelu:
        return leaky_relu(h, static_cast<Scalar>(shape_.slope));
      case Activation::Tanh:
        return ad::tanh(h);
      case Activation::Identity:
        break;
    }
    return h;
  }

  std::string prefix_;
  MlpShape shape_;
  std::vector<Index> dims_;
};

}  // namespace wsnf::ad

#endif  // WSNF_AUTODIFF_MLP_HPP
