#include "wsnf/data/preprocess.hpp"

#include <string>
#include <unordered_map>

namespace wsnf::data {

DedupResult deduplicate(const WeakDataset& ds) {
  std::unordered_map<std::string, Index> first_seen;
  std::vector<Index> keep;
  std::vector<Index> target(static_cast<std::size_t>(ds.size()));
  const auto row_bytes = static_cast<std::size_t>(ds.feature_dim()) * sizeof(double);
  for (Index i = 0; i < ds.size(); ++i) {
    std::string key(reinterpret_cast<const char*>(ds.features.row(i).data()), row_bytes);
    auto [it, inserted] = first_seen.emplace(std::move(key), static_cast<Index>(keep.size()));
    if (inserted) keep.push_back(i);
    target[static_cast<std::size_t>(i)] = it->second;
  }
  DedupResult result{select_rows(ds, keep), ds.size() - static_cast<Index>(keep.size())};
  for (Index i = 0; i < ds.size(); ++i) {
    const Index k = target[static_cast<std::size_t>(i)];
    result.dataset.matches.row(k) = result.dataset.matches.row(k).cwiseMax(ds.matches.row(i));
  }
  return result;
}

FilterResult filter_rare_lfs(const WeakDataset& ds, Index min_count) {
  if (min_count < 1) throw ConfigError("filter_rare_lfs: min_count must be at least 1");
  const std::vector<Index> counts = ds.match_counts();
  std::vector<Index> old_to_new(counts.size(), -1);
  Index next = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] >= min_count) old_to_new[j] = next++;
  }
  if (next == 0) {
    throw DataError(DataErrorKind::EmptyResult,
                    "every labeling function matches fewer than " + std::to_string(min_count) + " rows");
  }
  return {remap_lfs(ds, old_to_new), old_to_new};
}

WeakDataset remap_lfs(const WeakDataset& ds, const std::vector<Index>& old_to_new) {
  if (static_cast<Index>(old_to_new.size()) != ds.num_lfs()) {
    throw DataError(DataErrorKind::DimensionMismatch, "LF mapping size differs from LF count");
  }
  Index kept = 0;
  for (Index k : old_to_new) kept += k >= 0;
  WeakDataset out = ds;
  out.matches.resize(ds.size(), kept);
  out.lf_to_class.assign(static_cast<std::size_t>(kept), 0);
  if (!ds.lf_names.empty()) out.lf_names.assign(static_cast<std::size_t>(kept), {});
  for (std::size_t j = 0; j < old_to_new.size(); ++j) {
    const Index k = old_to_new[j];
    if (k < 0) continue;
    if (k >= kept) throw DataError(DataErrorKind::DimensionMismatch, "LF mapping target out of range");
    out.matches.col(k) = ds.matches.col(static_cast<Index>(j));
    out.lf_to_class[static_cast<std::size_t>(k)] = ds.lf_to_class[j];
    if (!ds.lf_names.empty()) out.lf_names[static_cast<std::size_t>(k)] = ds.lf_names[j];
  }
  return out;
}

MatchedSplit split_matched(const WeakDataset& ds) {
  MatchedSplit s;
  for (Index i = 0; i < ds.size(); ++i) (ds.matched(i) ? s.matched_rows : s.unmatched_rows).push_back(i);
  s.matched = select_rows(ds, s.matched_rows);
  s.unmatched = select_rows(ds, s.unmatched_rows);
  return s;
}

}  // namespace wsnf::data
