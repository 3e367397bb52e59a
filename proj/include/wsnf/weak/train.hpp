#ifndef WSNF_WEAK_TRAIN_HPP
#define WSNF_WEAK_TRAIN_HPP

#include "wsnf/data/dataset.hpp"
#include "wsnf/weak/model.hpp"

#include <vector>

namespace wsnf::weak {

struct TrainStats {
  std::vector<double> epoch_loss;  // mean batch loss per epoch
  Index steps = 0;
  Index skipped_negatives = 0;     // positives whose row matched every LF
};

struct TrainResult {
  WeakModel model;
  TrainStats stats;
};

/// Joint NLL of [x; lambda_i] over flow parameters and embedding rows.
TrainResult train_standard(const data::WeakDataset& ds, const TrainConfig& cfg);

/// Positive pairs through the positive table plus sampled negative pairs
/// through the negative table, one shared flow.
TrainResult train_negative(const data::WeakDataset& ds, const TrainConfig& cfg);

/// NLL of [x; sum alpha_i lambda_i] with simplex-sampled mixing weights.
TrainResult train_mixed(const data::WeakDataset& ds, const TrainConfig& cfg);

struct IterateResult {
  WeakModel model;
  TrainStats stats;                // of the final round
  int rounds = 0;                  // relabel-and-retrain rounds performed
  Index final_train_rows = 0;
  Index unmatched_remaining = 0;
  std::vector<Index> unmatched_rows;  // indices into the input dataset
  std::vector<Index> pseudo_lfs;      // LF assigned to each unmatched row
};

/// Train on matched rows, then `cfg.iterations` times assign each unmatched
/// row its most likely LF and retrain on everything.
IterateResult iterate(const data::WeakDataset& ds, const TrainConfig& cfg);

/// Dispatches on cfg.variant.
TrainResult train(const data::WeakDataset& ds, const TrainConfig& cfg);

}  // namespace wsnf::weak

#endif  // WSNF_WEAK_TRAIN_HPP
