#ifndef WSNF_AUTODIFF_ADAM_HPP
#define WSNF_AUTODIFF_ADAM_HPP

#include "wsnf/autodiff/param_store.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <string>

namespace wsnf::ad {

template <typename Scalar>
struct AdamState {
  Scalar learning_rate = Scalar(1e-4);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar epsilon = Scalar(1e-8);
  Scalar weight_decay = Scalar(0);
  std::int64_t step = 0;
  std::map<std::string, Matrix<Scalar>> first_moment;
  std::map<std::string, Matrix<Scalar>> second_moment;
};

/// One Adam update with bias correction followed by decoupled weight decay
/// p <- p * (1 - lr * wd). Consumes (zeroes) the gradients.
template <typename Scalar>
void adam_step(AdamState<Scalar>& state, ParamStore<Scalar>& params) {
  for (const auto& [name, value] : params.values()) {
    if (!params.has_grad(name)) throw Error("missing gradient for parameter '" + name + "'");
  }
  ++state.step;
  const Scalar c1 = Scalar(1) - std::pow(state.beta1, static_cast<Scalar>(state.step));
  const Scalar c2 = Scalar(1) - std::pow(state.beta2, static_cast<Scalar>(state.step));
  const Scalar decay = Scalar(1) - state.learning_rate * state.weight_decay;

  for (auto& [name, p] : params.values()) {
    const Matrix<Scalar>& g = params.grad(name);
    auto [mit, m_new] = state.first_moment.try_emplace(name, Matrix<Scalar>::Zero(p.rows(), p.cols()));
    auto [vit, v_new] = state.second_moment.try_emplace(name, Matrix<Scalar>::Zero(p.rows(), p.cols()));
    Matrix<Scalar>& m = mit->second;
    Matrix<Scalar>& v = vit->second;
    if (m.rows() != p.rows() || m.cols() != p.cols()) {
      throw ShapeError("optimizer moment shape mismatch for '" + name + "'");
    }
    m = state.beta1 * m + (Scalar(1) - state.beta1) * g;
    v = state.beta2 * v + (Scalar(1) - state.beta2) * g.cwiseAbs2();
    p.array() -= state.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + state.epsilon);
    if (state.weight_decay != Scalar(0)) p *= decay;
  }
  params.zero_grad();
}

}  // namespace wsnf::ad

#endif  // WSNF_AUTODIFF_ADAM_HPP
