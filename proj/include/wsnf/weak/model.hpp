#ifndef WSNF_WEAK_MODEL_HPP
#define WSNF_WEAK_MODEL_HPP

#include "wsnf/autodiff/checkpoint.hpp"
#include "wsnf/data/dataset.hpp"
#include "wsnf/flow/real_nvp.hpp"
#include "wsnf/weak/config.hpp"

#include <span>
#include <vector>

namespace wsnf::weak {

inline constexpr const char* kPositiveTable = "emb.pos";
inline constexpr const char* kNegativeTable = "emb.neg";

/// A flow over [x; lambda] together with its LF embedding tables.
///
/// All trainable state lives in `params`: the flow's coupling networks, the
/// positive embedding table (t x h) and, for the negative variant, a second
/// table of the same shape for the complement events.
struct WeakModel {
  Variant variant = Variant::Standard;
  Index feature_dim = 0;
  Index embedding_dim = 0;
  std::vector<Index> lf_to_class;
  Index num_classes = 0;
  std::vector<double> lf_priors;  // P(lambda) on the training split
  flow::RealNvp<double> flow{flow::FlowShape{1, 1, {}, 0.01}};
  ad::ParamStore<double> params;

  Index num_lfs() const { return static_cast<Index>(lf_to_class.size()); }
  Index dim() const { return feature_dim + embedding_dim; }
  const MatrixXd& positive() const { return params.value(kPositiveTable); }
  bool has_negative() const { return params.contains(kNegativeTable); }
  const MatrixXd& negative() const { return params.value(kNegativeTable); }
};

/// Fresh model for `ds` under `cfg`, with parameters drawn from seeds
/// derived from cfg.seed (one stream each for the flow and the tables).
WeakModel init_model(const data::WeakDataset& ds, const TrainConfig& cfg);

ad::Checkpoint to_checkpoint(const WeakModel& model, const TrainConfig& cfg);

struct LoadedModel {
  WeakModel model;
  TrainConfig config;
};

LoadedModel from_checkpoint(const ad::Checkpoint& ckpt);

/// [X, 1 * row] for every row of X.
MatrixXd join_embedding(const MatrixXd& x, const RowVectorXd& embedding);

/// log P(x | lambda) from the positive table.
double log_density(const WeakModel& model, const RowVectorXd& x, Index lf);

/// n x t matrix of log P(x_i | lambda_j).
MatrixXd log_density_matrix(const WeakModel& model, const MatrixXd& x);

/// n x t matrix of log P(x_i | not lambda_j) from the negative table.
MatrixXd negative_log_density_matrix(const WeakModel& model, const MatrixXd& x);

/// log P([x; alpha^T * positive]) for a probability vector alpha.
double log_density_mixed(const WeakModel& model, const RowVectorXd& x, std::span<const double> alpha);

/// Row-wise version: row i of `alphas` mixes for row i of `x`.
VectorXd log_density_mixed(const WeakModel& model, const MatrixXd& x, const MatrixXd& alphas);

/// argmax over classes of the max over the class's LFs of log P(x | lambda).
Index predict_standard(const WeakModel& model, const RowVectorXd& x);

/// Per-pair negative log-likelihood with a gathered embedding row per pair.
VectorXd pair_nll_standard(const WeakModel& model, const MatrixXd& x, std::span<const Index> lfs);

/// Per-pair negative log-likelihood with mixed embeddings alphas * positive.
VectorXd pair_nll_mixed(const WeakModel& model, const MatrixXd& x, const MatrixXd& alphas);

}  // namespace wsnf::weak

#endif  // WSNF_WEAK_MODEL_HPP
