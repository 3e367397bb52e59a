#ifndef WSNF_AUTODIFF_OPS_HPP
#define WSNF_AUTODIFF_OPS_HPP

#include "wsnf/autodiff/tape.hpp"

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace wsnf::ad {

namespace detail {

template <typename S>
Tape<S>& tape_of(const Var<S>& a, const Var<S>& b) {
  if (&a.tape() != &b.tape()) throw Error("operands live on different tapes");
  return a.tape();
}

template <typename S>
void require_same_shape(const Var<S>& a, const Var<S>& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()) + ")");
  }
}

template <typename S>
void require_scalar(const Var<S>& s, const char* op) {
  if (s.rows() != 1 || s.cols() != 1) throw ShapeError(std::string(op) + ": expected a 1x1 value");
}

inline void require_columns(std::span<const Index> idx, Index cols, const char* op) {
  for (Index c : idx) {
    if (c < 0 || c >= cols) throw ShapeError(std::string(op) + ": column index out of range");
  }
}

}  // namespace detail

template <typename S>
Var<S> operator+(const Var<S>& a, const Var<S>& b) {
  auto& t = detail::tape_of(a, b);
  detail::require_same_shape(a, b, "add");
  const Index ia = a.id(), ib = b.id();
  return t.record(a.value() + b.value(), "add", {a, b},
                  [ia, ib](Tape<S>& tp, Index, const Matrix<S>& g) {
                    tp.accumulate(ia, g);
                    tp.accumulate(ib, g);
                  });
}

template <typename S>
Var<S> operator-(const Var<S>& a, const Var<S>& b) {
  auto& t = detail::tape_of(a, b);
  detail::require_same_shape(a, b, "sub");
  const Index ia = a.id(), ib = b.id();
  return t.record(a.value() - b.value(), "sub", {a, b},
                  [ia, ib](Tape<S>& tp, Index, const Matrix<S>& g) {
                    tp.accumulate(ia, g);
                    tp.accumulate(ib, -g);
                  });
}

template <typename S>
Var<S> operator-(const Var<S>& a) {
  const Index ia = a.id();
  return a.tape().record(-a.value(), "neg", {a}, [ia](Tape<S>& tp, Index, const Matrix<S>& g) {
    tp.accumulate(ia, -g);
  });
}

template <typename S>
Var<S> cwise_product(const Var<S>& a, const Var<S>& b) {
  auto& t = detail::tape_of(a, b);
  detail::require_same_shape(a, b, "cwise_product");
  const Index ia = a.id(), ib = b.id();
  return t.record(a.value().cwiseProduct(b.value()), "cwise_product", {a, b},
                  [ia, ib](Tape<S>& tp, Index, const Matrix<S>& g) {
                    if (tp.needs_grad(ia)) tp.accumulate(ia, g.cwiseProduct(tp.value(ib)));
                    if (tp.needs_grad(ib)) tp.accumulate(ib, g.cwiseProduct(tp.value(ia)));
                  });
}

template <typename S>
Var<S> matmul(const Var<S>& a, const Var<S>& b) {
  auto& t = detail::tape_of(a, b);
  if (a.cols() != b.rows()) throw ShapeError("matmul: inner dimensions differ");
  const Index ia = a.id(), ib = b.id();
  Matrix<S> out = a.value() * b.value();
  return t.record(std::move(out), "matmul", {a, b},
                  [ia, ib](Tape<S>& tp, Index, const Matrix<S>& g) {
                    if (tp.needs_grad(ia)) tp.accumulate(ia, g * tp.value(ib).transpose());
                    if (tp.needs_grad(ib)) tp.accumulate(ib, tp.value(ia).transpose() * g);
                  });
}

/// Adds a 1 x cols row to every row of `a`.
template <typename S>
Var<S> add_row(const Var<S>& a, const Var<S>& row) {
  auto& t = detail::tape_of(a, row);
  if (row.rows() != 1 || row.cols() != a.cols()) throw ShapeError("add_row: bad row shape");
  const Index ia = a.id(), ir = row.id();
  Matrix<S> out = a.value().rowwise() + row.value().row(0);
  return t.record(std::move(out), "add_row", {a, row},
                  [ia, ir](Tape<S>& tp, Index, const Matrix<S>& g) {
                    tp.accumulate(ia, g);
                    if (tp.needs_grad(ir)) tp.accumulate(ir, g.colwise().sum());
                  });
}

/// Multiplies every entry of `a` by the 1x1 value `s`.
template <typename S>
Var<S> scale(const Var<S>& a, const Var<S>& s) {
  auto& t = detail::tape_of(a, s);
  detail::require_scalar(s, "scale");
  const Index ia = a.id(), is = s.id();
  return t.record(a.value() * s.value()(0, 0), "scale", {a, s},
                  [ia, is](Tape<S>& tp, Index, const Matrix<S>& g) {
                    if (tp.needs_grad(ia)) tp.accumulate(ia, g * tp.value(is)(0, 0));
                    if (tp.needs_grad(is)) {
                      tp.accumulate(is, Matrix<S>::Constant(1, 1, g.cwiseProduct(tp.value(ia)).sum()));
                    }
                  });
}

template <typename S>
Var<S> scale(const Var<S>& a, S c) {
  const Index ia = a.id();
  return a.tape().record(a.value() * c, "scale", {a}, [ia, c](Tape<S>& tp, Index, const Matrix<S>& g) {
    tp.accumulate(ia, g * c);
  });
}

template <typename S>
Var<S> add_scalar(const Var<S>& a, S c) {
  const Index ia = a.id();
  Matrix<S> out = a.value().array() + c;
  return a.tape().record(std::move(out), "add_scalar", {a},
                         [ia](Tape<S>& tp, Index, const Matrix<S>& g) { tp.accumulate(ia, g); });
}

template <typename S>
Var<S> exp(const Var<S>& a) {
  const Index ia = a.id();
  Matrix<S> out = a.value().array().exp();
  return a.tape().record(std::move(out), "exp", {a}, [ia](Tape<S>& tp, Index self, const Matrix<S>& g) {
    tp.accumulate(ia, g.cwiseProduct(tp.value(self)));
  });
}

template <typename S>
Var<S> tanh(const Var<S>& a) {
  const Index ia = a.id();
  Matrix<S> out = a.value().array().tanh();
  return a.tape().record(std::move(out), "tanh", {a}, [ia](Tape<S>& tp, Index self, const Matrix<S>& g) {
    const auto& y = tp.value(self);
    tp.accumulate(ia, (g.array() * (S(1) - y.array().square())).matrix());
  });
}

template <typename S>
Var<S> leaky_relu(const Var<S>& a, S slope) {
  const Index ia = a.id();
  Matrix<S> out = a.value().unaryExpr([slope](S x) { return x > S(0) ? x : slope * x; });
  return a.tape().record(std::move(out), "leaky_relu", {a},
                         [ia, slope](Tape<S>& tp, Index, const Matrix<S>& g) {
                           const auto& x = tp.value(ia);
                           Matrix<S> d = x.unaryExpr([slope](S v) { return v > S(0) ? S(1) : slope; });
                           tp.accumulate(ia, g.cwiseProduct(d));
                         });
}

template <typename S>
Var<S> square(const Var<S>& a) {
  const Index ia = a.id();
  return a.tape().record(a.value().cwiseAbs2(), "square", {a},
                         [ia](Tape<S>& tp, Index, const Matrix<S>& g) {
                           tp.accumulate(ia, S(2) * g.cwiseProduct(tp.value(ia)));
                         });
}

/// Sum of all entries, 1x1.
template <typename S>
Var<S> sum(const Var<S>& a) {
  const Index ia = a.id(), r = a.rows(), c = a.cols();
  return a.tape().record(Matrix<S>::Constant(1, 1, a.value().sum()), "sum", {a},
                         [ia, r, c](Tape<S>& tp, Index, const Matrix<S>& g) {
                           tp.accumulate(ia, Matrix<S>::Constant(r, c, g(0, 0)));
                         });
}

/// Mean of all entries, 1x1.
template <typename S>
Var<S> mean(const Var<S>& a) {
  if (a.value().size() == 0) throw ShapeError("mean of an empty value");
  const Index ia = a.id(), r = a.rows(), c = a.cols();
  const S n = static_cast<S>(a.value().size());
  return a.tape().record(Matrix<S>::Constant(1, 1, a.value().sum() / n), "mean", {a},
                         [ia, r, c, n](Tape<S>& tp, Index, const Matrix<S>& g) {
                           tp.accumulate(ia, Matrix<S>::Constant(r, c, g(0, 0) / n));
                         });
}

/// Per-row sum, rows x 1.
template <typename S>
Var<S> row_sum(const Var<S>& a) {
  const Index ia = a.id(), c = a.cols();
  Matrix<S> out = a.value().rowwise().sum();
  return a.tape().record(std::move(out), "row_sum", {a}, [ia, c](Tape<S>& tp, Index, const Matrix<S>& g) {
    tp.accumulate(ia, g.replicate(1, c));
  });
}

/// Selects columns of `a` in the given order.
template <typename S>
Var<S> gather_cols(const Var<S>& a, std::span<const Index> idx) {
  detail::require_columns(idx, a.cols(), "gather_cols");
  std::vector<Index> cols(idx.begin(), idx.end());
  const Index ia = a.id(), width = a.cols();
  Matrix<S> out(a.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = a.value().col(cols[j]);
  return a.tape().record(std::move(out), "gather_cols", {a},
                         [ia, width, cols = std::move(cols)](Tape<S>& tp, Index, const Matrix<S>& g) {
                           Matrix<S> ga = Matrix<S>::Zero(g.rows(), width);
                           for (std::size_t j = 0; j < cols.size(); ++j) {
                             ga.col(cols[j]) += g.col(static_cast<Index>(j));
                           }
                           tp.accumulate(ia, ga);
                         });
}

/// Interleaves the columns of `a` and `b` into a matrix of width
/// |idx_a| + |idx_b|; column j of `a` lands at idx_a[j].
template <typename S>
Var<S> merge_cols(const Var<S>& a, std::span<const Index> idx_a, const Var<S>& b,
                  std::span<const Index> idx_b) {
  auto& t = detail::tape_of(a, b);
  if (a.rows() != b.rows() || static_cast<Index>(idx_a.size()) != a.cols() ||
      static_cast<Index>(idx_b.size()) != b.cols()) {
    throw ShapeError("merge_cols: shape mismatch");
  }
  const Index width = a.cols() + b.cols();
  detail::require_columns(idx_a, width, "merge_cols");
  detail::require_columns(idx_b, width, "merge_cols");
  std::vector<Index> ca(idx_a.begin(), idx_a.end()), cb(idx_b.begin(), idx_b.end());
  Matrix<S> out(a.rows(), width);
  for (std::size_t j = 0; j < ca.size(); ++j) out.col(ca[j]) = a.value().col(static_cast<Index>(j));
  for (std::size_t j = 0; j < cb.size(); ++j) out.col(cb[j]) = b.value().col(static_cast<Index>(j));
  const Index ia = a.id(), ib = b.id();
  return t.record(std::move(out), "merge_cols", {a, b},
                  [ia, ib, ca = std::move(ca), cb = std::move(cb)](Tape<S>& tp, Index, const Matrix<S>& g) {
                    if (tp.needs_grad(ia)) {
                      Matrix<S> ga(g.rows(), static_cast<Index>(ca.size()));
                      for (std::size_t j = 0; j < ca.size(); ++j) ga.col(static_cast<Index>(j)) = g.col(ca[j]);
                      tp.accumulate(ia, ga);
                    }
                    if (tp.needs_grad(ib)) {
                      Matrix<S> gb(g.rows(), static_cast<Index>(cb.size()));
                      for (std::size_t j = 0; j < cb.size(); ++j) gb.col(static_cast<Index>(j)) = g.col(cb[j]);
                      tp.accumulate(ib, gb);
                    }
                  });
}

/// [a, b] side by side.
template <typename S>
Var<S> concat_cols(const Var<S>& a, const Var<S>& b) {
  auto& t = detail::tape_of(a, b);
  if (a.rows() != b.rows()) throw ShapeError("concat_cols: row counts differ");
  const Index ia = a.id(), ib = b.id(), ca = a.cols(), cb = b.cols();
  Matrix<S> out(a.rows(), ca + cb);
  out << a.value(), b.value();
  return t.record(std::move(out), "concat_cols", {a, b},
                  [ia, ib, ca, cb](Tape<S>& tp, Index, const Matrix<S>& g) {
                    if (tp.needs_grad(ia)) tp.accumulate(ia, g.leftCols(ca));
                    if (tp.needs_grad(ib)) tp.accumulate(ib, g.rightCols(cb));
                  });
}

/// Row lookup (embedding gather). Gradients scatter-add back into the rows.
template <typename S>
Var<S> gather_rows(const Var<S>& table, std::span<const Index> idx) {
  const Index rows = table.rows();
  for (Index r : idx) {
    if (r < 0 || r >= rows) throw ShapeError("gather_rows: row index out of range");
  }
  std::vector<Index> sel(idx.begin(), idx.end());
  Matrix<S> out(static_cast<Index>(sel.size()), table.cols());
  for (std::size_t i = 0; i < sel.size(); ++i) out.row(static_cast<Index>(i)) = table.value().row(sel[i]);
  const Index it = table.id();
  return table.tape().record(std::move(out), "gather_rows", {table},
                             [it, rows, sel = std::move(sel)](Tape<S>& tp, Index, const Matrix<S>& g) {
                               Matrix<S> gt = Matrix<S>::Zero(rows, g.cols());
                               for (std::size_t i = 0; i < sel.size(); ++i) {
                                 gt.row(sel[i]) += g.row(static_cast<Index>(i));
                               }
                               tp.accumulate(it, gt);
                             });
}

/// Mean softmax cross-entropy of `logits` (n x classes) against integer labels.
template <typename S>
Var<S> softmax_cross_entropy(const Var<S>& logits, std::span<const Index> labels) {
  const Index n = logits.rows(), c = logits.cols();
  if (static_cast<Index>(labels.size()) != n || n == 0) throw ShapeError("softmax_cross_entropy: label count");
  Matrix<S> probs(n, c);
  S loss = 0;
  for (Index i = 0; i < n; ++i) {
    const Index y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= c) throw ShapeError("softmax_cross_entropy: label out of range");
    const auto row = logits.value().row(i);
    const S m = row.maxCoeff();
    const S lse = m + std::log((row.array() - m).exp().sum());
    probs.row(i) = (row.array() - lse).exp();
    loss += lse - row(y);
  }
  loss /= static_cast<S>(n);
  std::vector<Index> ys(labels.begin(), labels.end());
  const Index il = logits.id();
  return logits.tape().record(Matrix<S>::Constant(1, 1, loss), "softmax_cross_entropy", {logits},
                              [il, n, probs = std::move(probs), ys = std::move(ys)](Tape<S>& tp, Index,
                                                                                    const Matrix<S>& g) {
                                Matrix<S> d = probs;
                                for (Index i = 0; i < n; ++i) d(i, ys[static_cast<std::size_t>(i)]) -= S(1);
                                tp.accumulate(il, d * (g(0, 0) / static_cast<S>(n)));
                              });
}

}  // namespace wsnf::ad

#endif  // WSNF_AUTODIFF_OPS_HPP
