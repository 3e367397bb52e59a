#ifndef WSNF_DATA_PREPROCESS_HPP
#define WSNF_DATA_PREPROCESS_HPP

#include "wsnf/data/dataset.hpp"

namespace wsnf::data {

struct DedupResult {
  WeakDataset dataset;
  Index removed = 0;
};

/// Drops rows whose feature vector is bit-identical to an earlier row. The
/// dropped rows' matches are OR-ed into the kept row.
DedupResult deduplicate(const WeakDataset& ds);

struct FilterResult {
  WeakDataset dataset;
  std::vector<Index> old_to_new;  // -1 for dropped LFs
};

/// Removes LFs matching fewer than `min_count` rows.
FilterResult filter_rare_lfs(const WeakDataset& ds, Index min_count);

/// Applies an LF remapping produced by filter_rare_lfs (e.g. to a test split).
WeakDataset remap_lfs(const WeakDataset& ds, const std::vector<Index>& old_to_new);

struct MatchedSplit {
  WeakDataset matched;    // rows with at least one match
  WeakDataset unmatched;  // rows with none
  std::vector<Index> matched_rows;
  std::vector<Index> unmatched_rows;
};

MatchedSplit split_matched(const WeakDataset& ds);

}  // namespace wsnf::data

#endif  // WSNF_DATA_PREPROCESS_HPP
