#include "wsnf/weak/train.hpp"

#include "wsnf/autodiff/adam.hpp"
#include "wsnf/aggregate/aggregate.hpp"
#include "wsnf/data/preprocess.hpp"
#include "wsnf/weak/model_inputs.hpp"
#include "wsnf/weak/samplers.hpp"

#include <optional>

namespace wsnf::weak {

namespace {

using VarD = ad::Var<double>;

MatrixXd batch_features(const data::WeakDataset& ds, std::span<const LfPair> pairs) {
  MatrixXd x(static_cast<Index>(pairs.size()), ds.feature_dim());
  for (std::size_t i = 0; i < pairs.size(); ++i) x.row(static_cast<Index>(i)) = ds.features.row(pairs[i].row);
  return x;
}

std::vector<Index> batch_lfs(std::span<const LfPair> pairs) {
  std::vector<Index> lfs;
  lfs.reserve(pairs.size());
  for (const auto& p : pairs) lfs.push_back(p.lf);
  return lfs;
}

// Batch loss builder: (tape, model, batch, aux rng, stats) -> scalar loss.
template <typename LossFn>
TrainStats run(WeakModel& model, const data::WeakDataset& ds, const TrainConfig& cfg, LossFn&& loss) {
  BalancedSampler sampler(ds.matches);
  if (sampler.epoch_size() == 0) {
    throw data::DataError(data::DataErrorKind::EmptyResult, "no matched rows to train on");
  }
  Rng batch_rng(derive_seed(cfg.seed, "batches"));
  Rng aux_rng(derive_seed(cfg.seed, "aux"));
  ad::AdamState<double> adam;
  adam.learning_rate = cfg.learning_rate;
  adam.weight_decay = cfg.weight_decay;

  TrainStats stats;
  model.params.zero_grad();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double total = 0.0;
    const auto batches = sampler.batches(batch_rng, cfg.batch_size);
    for (const auto& batch : batches) {
      try {
        ad::Tape<double> tape(model.params);
        VarD value = loss(tape, model, std::span<const LfPair>(batch), aux_rng, stats);
        total += value.value()(0, 0);
        tape.backward(value);
        adam_step(adam, model.params);
        for (const auto& name : model.params.names()) {
          if (!model.params.value(name).allFinite()) throw NonFiniteError("parameter '" + name + "' is not finite");
        }
      } catch (const NonFiniteError& e) {
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch + 1) + ", step " +
                              std::to_string(stats.steps + 1) + ": " + e.what());
      }
      ++stats.steps;
    }
    stats.epoch_loss.push_back(total / static_cast<double>(batches.size()));
  }
  model.params.clear_grads();
  return stats;
}

TrainResult train_standard_from(const data::WeakDataset& ds, const TrainConfig& cfg, std::optional<WeakModel> start) {
  data::validate(ds);
  TrainResult out{start ? std::move(*start) : init_model(ds, cfg), {}};
  if (start) out.model.lf_priors = aggregate::estimate_lf_priors(ds.matches).p;
  out.stats = run(out.model, ds, cfg,
                  [&](ad::Tape<double>& tape, const WeakModel& m, std::span<const LfPair> batch, Rng&, TrainStats&) {
                    const auto lfs = batch_lfs(batch);
                    return m.flow.nll_loss(tape, standard_inputs(tape, m, batch_features(ds, batch), lfs));
                  });
  return out;
}

}  // namespace

TrainResult train_standard(const data::WeakDataset& ds, const TrainConfig& cfg) {
  return train_standard_from(ds, cfg, std::nullopt);
}

TrainResult train_negative(const data::WeakDataset& ds, const TrainConfig& cfg) {
  data::validate(ds);
  TrainConfig c = cfg;
  c.variant = Variant::Negative;
  TrainResult out{init_model(ds, c), {}};
  out.stats = run(out.model, ds, c,
                  [&](ad::Tape<double>& tape, const WeakModel& m, std::span<const LfPair> batch, Rng& rng,
                      TrainStats& stats) {
                    const auto lfs = batch_lfs(batch);
                    VarD pos = m.flow.nll_loss(tape, standard_inputs(tape, m, batch_features(ds, batch), lfs));
                    const auto neg = sample_negative_pairs(batch, ds.matches, c.negatives_per_positive, rng);
                    stats.skipped_negatives += neg.skipped;
                    if (neg.pairs.empty()) return pos;
                    const auto neg_lfs = batch_lfs(neg.pairs);
                    VarD negl = m.flow.nll_loss(
                        tape, standard_inputs(tape, m, batch_features(ds, neg.pairs), neg_lfs, kNegativeTable));
                    const double np = static_cast<double>(batch.size());
                    const double nn = static_cast<double>(neg.pairs.size());
                    return ad::scale(pos, np / (np + nn)) + ad::scale(negl, nn / (np + nn));
                  });
  return out;
}

TrainResult train_mixed(const data::WeakDataset& ds, const TrainConfig& cfg) {
  data::validate(ds);
  TrainConfig c = cfg;
  c.variant = Variant::Mixed;
  TrainResult out{init_model(ds, c), {}};
  const MixingSets sets(ds.matches, c.cooccurrence_threshold);
  const Index t = ds.num_lfs();
  out.stats = run(out.model, ds, c,
                  [&](ad::Tape<double>& tape, const WeakModel& m, std::span<const LfPair> batch, Rng& rng,
                      TrainStats&) {
                    MatrixXd alphas(static_cast<Index>(batch.size()), t);
                    for (std::size_t i = 0; i < batch.size(); ++i) {
                      const auto set = sets.set_for(batch[i].row, batch[i].lf);
                      const auto w = sample_simplex_weights(set, t, c.simplex_floor, rng);
                      alphas.row(static_cast<Index>(i)) = Eigen::Map<const RowVectorXd>(w.data(), t);
                    }
                    return m.flow.nll_loss(tape, mixed_inputs(tape, m, batch_features(ds, batch), alphas));
                  });
  return out;
}

IterateResult iterate(const data::WeakDataset& ds, const TrainConfig& cfg) {
  data::validate(ds);
  TrainConfig c = cfg;
  c.variant = Variant::Iterative;
  auto split = data::split_matched(ds);

  TrainResult round = train_standard_from(split.matched, c, std::nullopt);
  IterateResult out;
  out.unmatched_rows = split.unmatched_rows;
  out.final_train_rows = split.matched.size();
  out.unmatched_remaining = split.unmatched.size();

  for (int r = 0; r < c.iterations && split.unmatched.size() > 0; ++r) {
    const MatrixXd logp = log_density_matrix(round.model, split.unmatched.features);
    data::WeakDataset pseudo = split.unmatched;
    pseudo.matches.setZero();
    out.pseudo_lfs.assign(static_cast<std::size_t>(logp.rows()), 0);
    for (Index i = 0; i < logp.rows(); ++i) {
      Index best = 0;
      for (Index j = 1; j < logp.cols(); ++j) {
        if (logp(i, j) > logp(i, best)) best = j;
      }
      pseudo.matches(i, best) = 1;
      out.pseudo_lfs[static_cast<std::size_t>(i)] = best;
    }
    const auto augmented = data::concat_rows(split.matched, pseudo);
    std::optional<WeakModel> start;
    if (c.warm_start) start = std::move(round.model);
    round = train_standard_from(augmented, c, std::move(start));
    out.final_train_rows = augmented.size();
    out.unmatched_remaining = 0;
    ++out.rounds;
  }
  // Priors describe the observed LFs, not the pseudo-labels.
  round.model.lf_priors = aggregate::estimate_lf_priors(ds.matches).p;
  out.model = std::move(round.model);
  out.stats = std::move(round.stats);
  return out;
}

TrainResult train(const data::WeakDataset& ds, const TrainConfig& cfg) {
  switch (cfg.variant) {
    case Variant::Standard:
      return train_standard(ds, cfg);
    case Variant::Negative:
      return train_negative(ds, cfg);
    case Variant::Mixed:
      return train_mixed(ds, cfg);
    case Variant::Iterative: {
      auto it = iterate(ds, cfg);
      return {std::move(it.model), std::move(it.stats)};
    }
  }
  throw ConfigError("unknown variant");
}

}  // namespace wsnf::weak
