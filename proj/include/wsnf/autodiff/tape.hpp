#ifndef WSNF_AUTODIFF_TAPE_HPP
#define WSNF_AUTODIFF_TAPE_HPP

#include "wsnf/autodiff/param_store.hpp"
#include "wsnf/core/error.hpp"
#include "wsnf/core/types.hpp"

#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wsnf::ad {

template <typename Scalar>
class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; only valid while the
/// owning tape is alive.
template <typename Scalar>
class Var {
 public:
  Var() = default;

  Tape<Scalar>& tape() const { return *tape_; }
  Index id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  const Matrix<Scalar>& value() const { return tape_->value(id_); }
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }

 private:
  friend class Tape<Scalar>;
  Var(Tape<Scalar>* tape, Index id) : tape_(tape), id_(id) {}

  Tape<Scalar>* tape_ = nullptr;
  Index id_ = -1;
};

/// Reverse-mode recording of matrix operations.
///
/// Every operation appends a node holding its value and, when any input needs
/// a gradient, a closure that pushes the output gradient to the inputs.
/// Nodes are appended in evaluation order, so a reverse sweep over the node
/// list is a valid topological order. A tape supports a single backward().
template <typename Scalar>
class Tape {
 public:
  using Mat = Matrix<Scalar>;
  /// (tape, id of the node being differentiated, gradient w.r.t. that node)
  using BackwardFn = std::function<void(Tape&, Index, const Mat&)>;

  struct NoGrad {};
  static constexpr NoGrad no_grad{};

  /// Recording tape without parameters.
  Tape() = default;

  /// Recording tape; backward() accumulates parameter gradients into `params`.
  explicit Tape(ParamStore<Scalar>& params) : source_(&params), sink_(&params) {}

  /// Evaluation-only tape over frozen parameters. Nothing is differentiable.
  Tape(const ParamStore<Scalar>& params, NoGrad) : source_(&params), recording_(false) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return recording_; }
  std::size_t size() const { return nodes_.size(); }

  Var<Scalar> constant(Mat value) {
    check_finite(value, "constant");
    Node node;
    node.value = std::move(value);
    nodes_.push_back(std::move(node));
    return Var<Scalar>(this, static_cast<Index>(nodes_.size()) - 1);
  }

  /// Leaf whose gradient is kept on the tape and can be read with grad().
  Var<Scalar> variable(Mat value) {
    Var<Scalar> v = constant(std::move(value));
    nodes_.back().needs_grad = recording_;
    return v;
  }

  /// Leaf bound to a named parameter. Repeated lookups share one node.
  Var<Scalar> param(const std::string& name) {
    if (source_ == nullptr) throw Error("tape has no parameter store");
    if (auto it = param_nodes_.find(name); it != param_nodes_.end()) {
      return Var<Scalar>(this, it->second);
    }
    Node node;
    node.ref = &source_->value(name);
    node.param = name;
    node.needs_grad = recording_ && sink_ != nullptr;
    nodes_.push_back(std::move(node));
    const Index id = static_cast<Index>(nodes_.size()) - 1;
    param_nodes_.emplace(name, id);
    return Var<Scalar>(this, id);
  }

  /// Appends an operation result. `backward` is kept only if an input needs
  /// a gradient.
  Var<Scalar> record(Mat value, std::string_view op, std::initializer_list<Var<Scalar>> inputs,
                     BackwardFn backward) {
    check_finite(value, op);
    bool needs = false;
    for (const auto& in : inputs) {
      if (in.tape_ != this) throw Error(std::string(op) + ": operands live on different tapes");
      needs = needs || nodes_[in.id_].needs_grad;
    }
    Node node;
    node.value = std::move(value);
    node.needs_grad = recording_ && needs;
    if (node.needs_grad) node.backward = std::move(backward);
    nodes_.push_back(std::move(node));
    return Var<Scalar>(this, static_cast<Index>(nodes_.size()) - 1);
  }

  const Mat& value(Index id) const {
    const Node& n = nodes_[id];
    return n.ref != nullptr ? *n.ref : n.value;
  }

  bool needs_grad(Index id) const { return nodes_[id].needs_grad; }

  template <typename Derived>
  void accumulate(Index id, const Eigen::MatrixBase<Derived>& g) {
    Node& n = nodes_[id];
    if (!n.needs_grad) return;
    if (!n.has_grad) {
      n.grad = g;
      n.has_grad = true;
    } else {
      n.grad += g;
    }
  }

  /// Differentiates a 1x1 loss. Parameter gradients are added to the store.
  void backward(const Var<Scalar>& loss) {
    if (consumed_) throw Error("backward called twice on the same tape");
    if (!recording_) throw Error("backward on an evaluation-only tape");
    if (loss.tape_ != this) throw Error("loss belongs to another tape");
    if (value(loss.id_).size() != 1) throw ShapeError("backward needs a scalar loss");
    consumed_ = true;

    accumulate(loss.id_, Mat::Ones(1, 1));
    for (Index i = loss.id_; i >= 0; --i) {
      Node& n = nodes_[i];
      if (!n.has_grad || !n.backward) continue;
      n.backward(*this, i, n.grad);
      n.backward = nullptr;
    }
    for (Node& n : nodes_) {
      if (!n.param.empty() && n.has_grad) sink_->accumulate_grad(n.param, n.grad);
    }
  }

  bool consumed() const { return consumed_; }

  /// Gradient of the last backward() w.r.t. `v`; zeros if none reached it.
  Mat grad(const Var<Scalar>& v) const {
    const Node& n = nodes_[v.id_];
    if (n.has_grad) return n.grad;
    return Mat::Zero(value(v.id_).rows(), value(v.id_).cols());
  }

 private:
  friend class Var<Scalar>;

  struct Node {
    Mat value;
    const Mat* ref = nullptr;
    std::string param;
    bool needs_grad = false;
    bool has_grad = false;
    Mat grad;
    BackwardFn backward;
  };

  static void check_finite(const Mat& m, std::string_view op) {
    if (!m.allFinite()) {
      throw NonFiniteError(std::string(op) + " produced a non-finite value");
    }
  }

  const ParamStore<Scalar>* source_ = nullptr;
  ParamStore<Scalar>* sink_ = nullptr;
  bool recording_ = true;
  bool consumed_ = false;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, Index> param_nodes_;
};

}  // namespace wsnf::ad

#endif  // WSNF_AUTODIFF_TAPE_HPP
