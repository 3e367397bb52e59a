#ifndef WSNF_FLOW_REAL_NVP_HPP
#define WSNF_FLOW_REAL_NVP_HPP

#include "wsnf/autodiff/mlp.hpp"
#include "wsnf/autodiff/ops.hpp"
#include "wsnf/core/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace wsnf::flow {

using ad::ParamStore;
using ad::Tape;
using ad::Var;

struct FlowShape {
  Index dim = 0;
  int depth = 6;
  std::vector<Index> hidden{128, 128};
  double slope = 0.01;
};

/// Coordinates left untouched by coupling layer `layer`: indices with
/// (i + layer) even. Consecutive layers therefore swap roles.
inline std::vector<Index> pass_through_indices(Index dim, int layer) {
  std::vector<Index> idx;
  for (Index i = 0; i < dim; ++i) {
    if ((i + layer) % 2 == 0) idx.push_back(i);
  }
  return idx;
}

inline std::vector<Index> transformed_indices(Index dim, int layer) {
  std::vector<Index> idx;
  for (Index i = 0; i < dim; ++i) {
    if ((i + layer) % 2 != 0) idx.push_back(i);
  }
  return idx;
}

/// Affine coupling. In the generative direction the transformed half maps as
/// y = x * exp(s(x_pass)) + t(x_pass); `forward` applies the inverse of that
/// (data to base) and reports log|det| = -sum(s).
///
/// s is tanh-bounded and multiplied by a learnable scalar `<prefix>.scale`.
/// The output layers of s and t start at zero, so a fresh layer is the
/// identity.
template <typename Scalar>
class CouplingLayer {
 public:
  using Mat = Matrix<Scalar>;

  CouplingLayer(std::string prefix, Index dim, int layer, const FlowShape& shape)
      : prefix_(std::move(prefix)),
        pass_(pass_through_indices(dim, layer)),
        trans_(transformed_indices(dim, layer)) {
    const auto in = static_cast<Index>(pass_.size()), out = static_cast<Index>(trans_.size());
    s_net_ = ad::Mlp<Scalar>(prefix_ + ".s",
                             {in, shape.hidden, out, ad::Activation::LeakyRelu, ad::Activation::Tanh, shape.slope});
    t_net_ = ad::Mlp<Scalar>(prefix_ + ".t",
                             {in, shape.hidden, out, ad::Activation::LeakyRelu, ad::Activation::Identity, shape.slope});
  }

  const std::vector<Index>& pass_through() const { return pass_; }
  const std::vector<Index>& transformed() const { return trans_; }
  const ad::Mlp<Scalar>& s_net() const { return s_net_; }
  const ad::Mlp<Scalar>& t_net() const { return t_net_; }
  std::string scale_name() const { return prefix_ + ".scale"; }

  void init(ParamStore<Scalar>& params, Rng& rng) const {
    s_net_.init(params, rng, /*zero_last=*/true);
    t_net_.init(params, rng, /*zero_last=*/true);
    params.add(scale_name(), Mat::Ones(1, 1));
  }

  Var<Scalar> log_scale(Tape<Scalar>& tape, const Var<Scalar>& x_pass) const {
    return ad::scale(s_net_.forward(tape, x_pass), tape.param(scale_name()));
  }

  /// Data to base. Returns (z, per-row log|det J|).
  std::pair<Var<Scalar>, Var<Scalar>> forward(Tape<Scalar>& tape, const Var<Scalar>& x) const {
    Var<Scalar> xp = ad::gather_cols<Scalar>(x, pass_);
    Var<Scalar> xt = ad::gather_cols<Scalar>(x, trans_);
    Var<Scalar> s = log_scale(tape, xp);
    Var<Scalar> t = t_net_.forward(tape, xp);
    Var<Scalar> zt = ad::cwise_product(xt - t, ad::exp(-s));
    Var<Scalar> z = ad::merge_cols<Scalar>(xp, pass_, zt, trans_);
    return {z, -ad::row_sum(s)};
  }

  /// Base to data.
  Mat inverse(const ParamStore<Scalar>& params, const Mat& z) const {
    Tape<Scalar> tape(params, Tape<Scalar>::no_grad);
    Var<Scalar> zv = tape.constant(z);
    Var<Scalar> zp = ad::gather_cols<Scalar>(zv, pass_);
    Var<Scalar> zt = ad::gather_cols<Scalar>(zv, trans_);
    Var<Scalar> s = log_scale(tape, zp);
    Var<Scalar> t = t_net_.forward(tape, zp);
    Var<Scalar> xt = ad::cwise_product(zt, ad::exp(s)) + t;
    return ad::merge_cols<Scalar>(zp, pass_, xt, trans_).value();
  }

 private:
  std::string prefix_;
  std::vector<Index> pass_;
  std::vector<Index> trans_;
  ad::Mlp<Scalar> s_net_;
  ad::Mlp<Scalar> t_net_;
};

/// RealNVP stack with a standard-normal base. `forward` is the trained map f
/// (data to base); `inverse` is the generative direction.
template <typename Scalar>
class RealNvp {
 public:
  using Mat = Matrix<Scalar>;
  using Vec = Vector<Scalar>;

  struct Output {
    Var<Scalar> z;
    Var<Scalar> logdet;  // rows x 1
  };

  explicit RealNvp(FlowShape shape, std::string prefix = "flow") : shape_(std::move(shape)), prefix_(std::move(prefix)) {
    if (shape_.dim < 1) throw ConfigError("flow dimension must be positive");
    if (shape_.depth < 1) throw ConfigError("flow depth must be positive");
    for (int l = 0; l < shape_.depth; ++l) {
      layers_.emplace_back(prefix_ + "." + std::to_string(l), shape_.dim, l, shape_);
    }
  }

  const FlowShape& shape() const { return shape_; }
  Index dim() const { return shape_.dim; }
  const std::vector<CouplingLayer<Scalar>>& layers() const { return layers_; }

  void init(ParamStore<Scalar>& params, Rng& rng) const {
    for (const auto& layer : layers_) layer.init(params, rng);
  }

  /// True when every coordinate is transformed by at least one layer.
  bool covers_all_dims() const {
    std::vector<bool> seen(static_cast<std::size_t>(shape_.dim), false);
    for (const auto& layer : layers_) {
      for (Index i : layer.transformed()) seen[static_cast<std::size_t>(i)] = true;
    }
    for (bool b : seen) {
      if (!b) return false;
    }
    return true;
  }

  Output forward(Tape<Scalar>& tape, const Var<Scalar>& v) const {
    check_width(v.cols());
    Var<Scalar> z = v;
    Var<Scalar> logdet = tape.constant(Mat::Zero(v.rows(), 1));
    for (const auto& layer : layers_) {
      auto [next, ld] = layer.forward(tape, z);
      z = next;
      logdet = logdet + ld;
    }
    return {z, logdet};
  }

  /// log N(f(v); 0, I) + log|det df/dv|, rows x 1.
  Var<Scalar> log_prob(Tape<Scalar>& tape, const Var<Scalar>& v) const {
    Output out = forward(tape, v);
    Var<Scalar> base = ad::add_scalar(ad::scale(ad::row_sum(ad::square(out.z)), Scalar(-0.5)), log_normalizer());
    return base + out.logdet;
  }

  /// Negative mean log-likelihood of the rows of `batch`.
  Var<Scalar> nll_loss(Tape<Scalar>& tape, const Var<Scalar>& batch) const {
    if (batch.rows() == 0) throw ShapeError("nll_loss on an empty batch");
    return -ad::mean(log_prob(tape, batch));
  }

  std::pair<Mat, Vec> forward(const ParamStore<Scalar>& params, const Mat& v) const {
    Tape<Scalar> tape(params, Tape<Scalar>::no_grad);
    Output out = forward(tape, tape.constant(v));
    return {out.z.value(), out.logdet.value().col(0)};
  }

  Mat inverse(const ParamStore<Scalar>& params, const Mat& z) const {
    check_width(z.cols());
    if (!z.allFinite()) throw NonFiniteError("inverse: non-finite input");
    Mat x = z;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) x = it->inverse(params, x);
    return x;
  }

  Vec log_prob(const ParamStore<Scalar>& params, const Mat& v) const {
    Tape<Scalar> tape(params, Tape<Scalar>::no_grad);
    return log_prob(tape, tape.constant(v)).value().col(0);
  }

  Scalar nll_loss(const ParamStore<Scalar>& params, const Mat& batch) const {
    Tape<Scalar> tape(params, Tape<Scalar>::no_grad);
    return nll_loss(tape, tape.constant(batch)).value()(0, 0);
  }

  /// -D/2 log(2 pi)
  Scalar log_normalizer() const {
    return Scalar(-0.5) * static_cast<Scalar>(shape_.dim) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
  }

 private:
  void check_width(Index cols) const {
    if (cols != shape_.dim) {
      throw ShapeError("flow input width " + std::to_string(cols) + ", expected " + std::to_string(shape_.dim));
    }
  }

  FlowShape shape_;
  std::string prefix_;
  std::vector<CouplingLayer<Scalar>> layers_;
};

}  // namespace wsnf::flow

#endif  // WSNF_FLOW_REAL_NVP_HPP
