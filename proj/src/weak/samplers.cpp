#include "wsnf/weak/samplers.hpp"

#include <algorithm>

namespace wsnf::weak {

BalancedSampler::BalancedSampler(const MatchMatrix& matches) : by_lf_(static_cast<std::size_t>(matches.cols())) {
  for (Index i = 0; i < matches.rows(); ++i) {
    for (Index j = 0; j < matches.cols(); ++j) {
      if (matches(i, j)) by_lf_[static_cast<std::size_t>(j)].push_back(i);
    }
  }
  for (std::size_t j = 0; j < by_lf_.size(); ++j) {
    if (by_lf_[j].empty()) {
      throw data::DataError(data::DataErrorKind::EmptyResult,
                            "labeling function " + std::to_string(j) + " has no matches; filter rare LFs first");
    }
    max_count_ = std::max(max_count_, static_cast<Index>(by_lf_[j].size()));
  }
}

std::vector<LfPair> BalancedSampler::epoch(Rng& rng) const {
  std::vector<LfPair> out;
  out.reserve(static_cast<std::size_t>(epoch_size()));
  for (std::size_t j = 0; j < by_lf_.size(); ++j) {
    const auto& rows = by_lf_[j];
    const auto lf = static_cast<Index>(j);
    for (Index r : rows) out.push_back({r, lf});
    for (auto extra = static_cast<Index>(rows.size()); extra < max_count_; ++extra) {
      out.push_back({rows[static_cast<std::size_t>(rng.index(rows.size()))], lf});
    }
  }
  rng.shuffle(std::span<LfPair>(out));
  return out;
}

std::vector<std::vector<LfPair>> BalancedSampler::batches(Rng& rng, Index batch_size) const {
  if (batch_size < 1) throw ConfigError("batch size must be positive");
  const auto pairs = epoch(rng);
  std::vector<std::vector<LfPair>> out;
  for (std::size_t start = 0; start < pairs.size(); start += static_cast<std::size_t>(batch_size)) {
    const auto end = std::min(pairs.size(), start + static_cast<std::size_t>(batch_size));
    out.emplace_back(pairs.begin() + static_cast<std::ptrdiff_t>(start), pairs.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

std::vector<std::vector<LfPair>> balanced_batches(const data::WeakDataset& ds, Index batch_size, std::uint64_t seed) {
  Rng rng(seed);
  return BalancedSampler(ds.matches).batches(rng, batch_size);
}

NegativeSample sample_negative_pairs(std::span<const LfPair> positives, const MatchMatrix& matches, int k, Rng& rng) {
  if (k < 0) throw ConfigError("negatives per positive must be non-negative");
  NegativeSample out;
  std::vector<Index> free;
  for (const auto& p : positives) {
    if (p.row < 0 || p.row >= matches.rows()) throw ShapeError("negative sampling: row out of range");
    free.clear();
    for (Index j = 0; j < matches.cols(); ++j) {
      if (!matches(p.row, j)) free.push_back(j);
    }
    if (free.empty()) {
      ++out.skipped;
      continue;
    }
    for (int n = 0; n < k; ++n) {
      out.pairs.push_back({p.row, free[static_cast<std::size_t>(rng.index(free.size()))]});
    }
  }
  return out;
}

std::vector<double> sample_simplex_weights(std::span<const Index> set, Index num_lfs, double floor, Rng& rng) {
  if (set.empty()) throw ConfigError("mixing set must not be empty");
  if (floor < 0.0 || floor * static_cast<double>(num_lfs) >= 1.0) {
    throw ConfigError("simplex floor must satisfy 0 <= floor * t < 1");
  }
  std::vector<double> w(static_cast<std::size_t>(num_lfs), floor);
  std::vector<double> e(set.size());
  double total = 0.0;
  for (auto& v : e) {
    v = rng.exponential();
    total += v;
  }
  const double mass = 1.0 - floor * static_cast<double>(num_lfs);
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i] < 0 || set[i] >= num_lfs) throw ShapeError("mixing set member out of range");
    w[static_cast<std::size_t>(set[i])] += mass * e[i] / total;
  }
  return w;
}

MixingSets::MixingSets(const MatchMatrix& matches, Index threshold) : matches_(matches) {
  for (auto& s : data::cooccurrence_sets(matches, threshold)) {
    if (s.lfs.size() >= 2) sets_.push_back(std::move(s));
  }
  std::stable_sort(sets_.begin(), sets_.end(),
                   [](const data::LfSet& a, const data::LfSet& b) { return a.lfs.size() > b.lfs.size(); });
}

std::vector<Index> MixingSets::set_for(Index row, Index lf) const {
  for (const auto& s : sets_) {
    if (!std::binary_search(s.lfs.begin(), s.lfs.end(), lf)) continue;
    const bool contained = std::all_of(s.lfs.begin(), s.lfs.end(), [&](Index j) { return matches_(row, j) != 0; });
    if (contained) return s.lfs;
  }
  return {lf};
}

}  // namespace wsnf::weak
