#ifndef WSNF_AUTODIFF_PARAM_STORE_HPP
#define WSNF_AUTODIFF_PARAM_STORE_HPP

#include "wsnf/core/error.hpp"
#include "wsnf/core/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace wsnf::ad {

/// Named trainable parameters and their gradients.
///
/// Names are unique and iteration is in name order, so anything derived from
/// a walk over the store (checkpoints, optimizer updates) is deterministic.
/// Gradients are created lazily: a parameter has no gradient until something
/// accumulates into it or zero_grad() is called.
template <typename Scalar>
class ParamStore {
 public:
  using Mat = Matrix<Scalar>;

  void add(const std::string& name, Mat value) {
    if (!values_.emplace(name, std::move(value)).second) {
      throw Error("duplicate parameter name '" + name + "'");
    }
  }

  bool contains(const std::string& name) const { return values_.count(name) != 0; }

  const Mat& value(const std::string& name) const { return lookup(values_, name); }
  Mat& value(const std::string& name) { return lookup(values_, name); }

  bool has_grad(const std::string& name) const { return grads_.count(name) != 0; }
  const Mat& grad(const std::string& name) const { return lookup(grads_, name); }

  void accumulate_grad(const std::string& name, const Mat& g) {
    const Mat& v = value(name);
    if (g.rows() != v.rows() || g.cols() != v.cols()) {
      throw ShapeError("gradient shape mismatch for '" + name + "'");
    }
    auto it = grads_.find(name);
    if (it == grads_.end()) {
      grads_.emplace(name, g);
    } else {
      it->second += g;
    }
  }

  void zero_grad() {
    for (const auto& [name, v] : values_) {
      grads_[name] = Mat::Zero(v.rows(), v.cols());
    }
  }

  void clear_grads() { grads_.clear(); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(values_.size());
    for (const auto& kv : values_) out.push_back(kv.first);
    return out;
  }

  std::size_t size() const { return values_.size(); }

  Index parameter_count() const {
    Index n = 0;
    for (const auto& kv : values_) n += kv.second.size();
    return n;
  }

  const std::map<std::string, Mat>& values() const { return values_; }
  std::map<std::string, Mat>& values() { return values_; }

  friend bool operator==(const ParamStore& a, const ParamStore& b) {
    if (a.values_.size() != b.values_.size()) return false;
    for (auto ia = a.values_.begin(), ib = b.values_.begin(); ia != a.values_.end(); ++ia, ++ib) {
      if (ia->first != ib->first || ia->second.rows() != ib->second.rows() ||
          ia->second.cols() != ib->second.cols() || ia->second != ib->second) {
        return false;
      }
    }
    return true;
  }

 private:
  template <typename Map>
  static auto& lookup(Map& m, const std::string& name) {
    auto it = m.find(name);
    if (it == m.end()) throw Error("unknown parameter '" + name + "'");
    return it->second;
  }

  std::map<std::string, Mat> values_;
  std::map<std::string, Mat> grads_;
};

}  // namespace wsnf::ad

#endif  // WSNF_AUTODIFF_PARAM_STORE_HPP
