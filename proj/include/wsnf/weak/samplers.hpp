#ifndef WSNF_WEAK_SAMPLERS_HPP
#define WSNF_WEAK_SAMPLERS_HPP

#include "wsnf/core/rng.hpp"
#include "wsnf/data/analysis.hpp"
#include "wsnf/data/dataset.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace wsnf::weak {

/// A training pair: sample `row` labeled by labeling function `lf`.
struct LfPair {
  Index row = 0;
  Index lf = 0;

  friend bool operator==(const LfPair&, const LfPair&) = default;
};

/// Epochs in which every LF appears equally often.
///
/// Each LF contributes all of its matches once, then is topped up with draws
/// (with replacement) from its own matches until it reaches the largest
/// per-LF match count. The epoch is shuffled as a whole. Throws DataError
/// if some LF has no match at all.
class BalancedSampler {
 public:
  explicit BalancedSampler(const MatchMatrix& matches);

  Index max_count() const { return max_count_; }
  Index epoch_size() const { return max_count_ * static_cast<Index>(by_lf_.size()); }

  std::vector<LfPair> epoch(Rng& rng) const;
  std::vector<std::vector<LfPair>> batches(Rng& rng, Index batch_size) const;

 private:
  std::vector<std::vector<Index>> by_lf_;
  Index max_count_ = 0;
};

/// One epoch of batches for `ds` with a sampler seeded by `seed`.
std::vector<std::vector<LfPair>> balanced_batches(const data::WeakDataset& ds, Index batch_size, std::uint64_t seed);

struct NegativeSample {
  std::vector<LfPair> pairs;  // (row, lf) with matches(row, lf) == 0
  Index skipped = 0;          // positives whose row matches every LF
};

/// k negatives per positive pair, uniform (with replacement) over the LFs
/// that do not match the row anywhere in `matches`.
NegativeSample sample_negative_pairs(std::span<const LfPair> positives, const MatchMatrix& matches, int k, Rng& rng);

/// Mixing weights over all t LFs: every LF receives `floor`, and the
/// remaining 1 - floor * t is split over `set` by a uniform draw from the
/// simplex (symmetric Dirichlet(1)).
std::vector<double> sample_simplex_weights(std::span<const Index> set, Index num_lfs, double floor, Rng& rng);

/// Chooses, for a (row, lf) pair, which matching set the mixed model mixes
/// over: the largest frequent co-occurrence set that contains `lf` and is
/// contained in the row's matches (ties broken lexicographically). The
/// singleton {lf} is always allowed.
class MixingSets {
 public:
  MixingSets(const MatchMatrix& matches, Index threshold);

  std::vector<Index> set_for(Index row, Index lf) const;
  const std::vector<data::LfSet>& sets() const { return sets_; }

 private:
  MatchMatrix matches_;
  std::vector<data::LfSet> sets_;  // size >= 2, largest first
};

}  // namespace wsnf::weak

#endif  // WSNF_WEAK_SAMPLERS_HPP
