#include "wsnf/weak/model_inputs.hpp"

#include <cmath>

namespace wsnf::weak {

ad::Var<double> standard_inputs(ad::Tape<double>& tape, const WeakModel& model, const MatrixXd& x,
                                std::span<const Index> lfs, const char* table) {
  if (x.cols() != model.feature_dim) throw ShapeError("feature width differs from the model's");
  auto emb = ad::gather_rows(tape.param(table), lfs);
  return ad::concat_cols(tape.constant(x), emb);
}

ad::Var<double> mixed_inputs(ad::Tape<double>& tape, const WeakModel& model, const MatrixXd& x,
                             const MatrixXd& alphas) {
  if (x.cols() != model.feature_dim) throw ShapeError("feature width differs from the model's");
  auto emb = ad::matmul(tape.constant(alphas), tape.param(kPositiveTable));
  return ad::concat_cols(tape.constant(x), emb);
}

void check_mixing_weights(const MatrixXd& alphas, Index num_lfs) {
  if (alphas.cols() != num_lfs) throw ShapeError("mixing weights must cover every LF");
  for (Index i = 0; i < alphas.rows(); ++i) {
    if ((alphas.row(i).array() < 0.0).any()) throw Error("mixing weights must be non-negative");
    if (std::abs(alphas.row(i).sum() - 1.0) > 1e-9) throw Error("mixing weights must sum to 1");
  }
}

}  // namespace wsnf::weak
