#include "wsnf/baselines/baselines.hpp"

#include "wsnf/autodiff/adam.hpp"
#include "wsnf/core/rng.hpp"

#include <algorithm>
#include <numeric>

namespace wsnf::baselines {

std::vector<Index> majority_vote(const data::WeakDataset& ds, std::uint64_t seed) {
  data::validate(ds);
  const Index k = ds.num_classes();
  if (k < 1) throw ConfigError("majority vote needs at least one class");
  Rng rng(derive_seed(seed, "majority-vote"));
  std::vector<Index> out(static_cast<std::size_t>(ds.size()));
  std::vector<Index> votes(static_cast<std::size_t>(k));
  std::vector<Index> tied;
  for (Index i = 0; i < ds.size(); ++i) {
    std::fill(votes.begin(), votes.end(), 0);
    for (Index j = 0; j < ds.num_lfs(); ++j) {
      if (ds.matches(i, j)) ++votes[static_cast<std::size_t>(ds.lf_to_class[static_cast<std::size_t>(j)])];
    }
    const Index best = *std::max_element(votes.begin(), votes.end());
    tied.clear();
    for (Index y = 0; y < k; ++y) {
      if (votes[static_cast<std::size_t>(y)] == best) tied.push_back(y);
    }
    out[static_cast<std::size_t>(i)] =
        tied.size() == 1 ? tied[0] : tied[static_cast<std::size_t>(rng.index(tied.size()))];
  }
  return out;
}

MlpClassifier::MlpClassifier(Index input_dim, Index num_classes, const MlpTrainConfig& cfg)
    : net_("mlp", {input_dim, cfg.hidden, num_classes, ad::Activation::LeakyRelu, ad::Activation::Identity, cfg.slope}),
      num_classes_(num_classes) {}

std::vector<Index> MlpClassifier::predict(const MatrixXd& x) const {
  const MatrixXd z = logits(x);
  std::vector<Index> out(static_cast<std::size_t>(z.rows()));
  for (Index i = 0; i < z.rows(); ++i) {
    Index best = 0;
    for (Index y = 1; y < z.cols(); ++y) {
      if (z(i, y) > z(i, best)) best = y;
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

MlpClassifier train_mlp(const MatrixXd& x, std::span<const Index> labels, Index num_classes,
                        const MlpTrainConfig& cfg, std::uint64_t seed) {
  if (static_cast<Index>(labels.size()) != x.rows()) throw ShapeError("one label per row expected");
  if (cfg.epochs < 0 || cfg.batch_size < 1 || !(cfg.learning_rate > 0.0) || cfg.weight_decay < 0.0) {
    throw ConfigError("invalid MLP training configuration");
  }
  MlpClassifier clf(x.cols(), num_classes, cfg);
  Rng init_rng(derive_seed(seed, "mlp-init"));
  clf.net().init(clf.params(), init_rng);
  if (x.rows() == 0) return clf;

  Rng batch_rng(derive_seed(seed, "mlp-batches"));
  ad::AdamState<double> adam;
  adam.learning_rate = cfg.learning_rate;
  adam.weight_decay = cfg.weight_decay;
  std::vector<Index> order(static_cast<std::size_t>(x.rows()));
  std::vector<Index> batch_labels;
  clf.params().zero_grad();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), Index{0});
    batch_rng.shuffle(std::span<Index>(order));
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const auto end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      MatrixXd xb(static_cast<Index>(end - start), x.cols());
      batch_labels.clear();
      for (std::size_t i = start; i < end; ++i) {
        xb.row(static_cast<Index>(i - start)) = x.row(order[i]);
        batch_labels.push_back(labels[static_cast<std::size_t>(order[i])]);
      }
      try {
        ad::Tape<double> tape(clf.params());
        auto loss = ad::softmax_cross_entropy(clf.net().forward(tape, tape.constant(xb)),
                                              std::span<const Index>(batch_labels));
        tape.backward(loss);
        adam_step(adam, clf.params());
      } catch (const NonFiniteError& e) {
        throw DivergenceError("MLP baseline diverged at epoch " + std::to_string(epoch + 1) + ": " + e.what());
      }
    }
  }
  clf.params().clear_grads();
  return clf;
}

MlpClassifier train_mv_mlp(const data::WeakDataset& ds, const MlpTrainConfig& cfg, std::uint64_t seed) {
  const auto labels = majority_vote(ds, seed);
  return train_mlp(ds.features, labels, ds.num_classes(), cfg, seed);
}

}  // namespace wsnf::baselines
