#ifndef WSNF_BASELINES_BASELINES_HPP
#define WSNF_BASELINES_BASELINES_HPP

#include "wsnf/autodiff/mlp.hpp"
#include "wsnf/data/dataset.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace wsnf::baselines {

/// Class with the most matching LFs per row. Ties, and rows without any
/// match, are broken uniformly at random (over the tied classes, or over
/// all classes) from a stream seeded by `seed`.
std::vector<Index> majority_vote(const data::WeakDataset& ds, std::uint64_t seed);

struct MlpTrainConfig {
  std::vector<Index> hidden{128, 128};
  double slope = 0.01;
  int epochs = 50;
  double learning_rate = 1e-3;
  double weight_decay = 1e-3;
  Index batch_size = 64;
};

/// Softmax classifier on dense features.
class MlpClassifier {
 public:
  MlpClassifier() = default;
  MlpClassifier(Index input_dim, Index num_classes, const MlpTrainConfig& cfg);

  MatrixXd logits(const MatrixXd& x) const { return net_(params_, x); }
  std::vector<Index> predict(const MatrixXd& x) const;

  Index num_classes() const { return num_classes_; }
  const ad::Mlp<double>& net() const { return net_; }
  ad::ParamStore<double>& params() { return params_; }
  const ad::ParamStore<double>& params() const { return params_; }

 private:
  ad::Mlp<double> net_;
  ad::ParamStore<double> params_;
  Index num_classes_ = 0;
};

/// Cross-entropy training on (x, labels). Throws DivergenceError when a
/// step produces a non-finite value.
MlpClassifier train_mlp(const MatrixXd& x, std::span<const Index> labels, Index num_classes,
                        const MlpTrainConfig& cfg, std::uint64_t seed);

/// MLP trained on the majority-vote labels of `ds` (all rows).
MlpClassifier train_mv_mlp(const data::WeakDataset& ds, const MlpTrainConfig& cfg, std::uint64_t seed);

}  // namespace wsnf::baselines

#endif  // WSNF_BASELINES_BASELINES_HPP
