#include "wsnf/data/analysis.hpp"

#include "wsnf/core/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>

namespace wsnf::data {

namespace {

using Bits = std::vector<std::uint64_t>;

Index popcount(const Bits& b) {
  Index n = 0;
  for (auto w : b) n += std::popcount(w);
  return n;
}

Bits intersect(const Bits& a, const Bits& b) {
  Bits out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] & b[i];
  return out;
}

}  // namespace

std::vector<LfSet> cooccurrence_sets(const MatchMatrix& matches, Index threshold) {
  if (threshold < 1) throw Error("cooccurrence_sets: threshold must be at least 1");
  const Index n = matches.rows(), t = matches.cols();
  const std::size_t words = static_cast<std::size_t>((n + 63) / 64);

  std::vector<Bits> columns(static_cast<std::size_t>(t), Bits(words, 0));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < t; ++j) {
      if (matches(i, j)) columns[static_cast<std::size_t>(j)][static_cast<std::size_t>(i / 64)] |= 1ULL << (i % 64);
    }
  }

  std::vector<LfSet> out;
  for (Index j = 0; j < t; ++j) out.push_back({{j}, popcount(columns[static_cast<std::size_t>(j)])});

  // Level-wise growth: a set can only reach the threshold if every subset
  // does, so (k+1)-sets are built from frequent k-sets sharing a k-1 prefix.
  std::map<std::vector<Index>, Bits> level;
  for (Index j = 0; j < t; ++j) {
    if (out[static_cast<std::size_t>(j)].count >= threshold) level.emplace(std::vector<Index>{j}, columns[static_cast<std::size_t>(j)]);
  }
  while (level.size() > 1) {
    std::map<std::vector<Index>, Bits> next;
    for (auto a = level.begin(); a != level.end(); ++a) {
      for (auto b = std::next(a); b != level.end(); ++b) {
        const auto& ka = a->first;
        const auto& kb = b->first;
        if (!std::equal(ka.begin(), ka.end() - 1, kb.begin())) break;
        std::vector<Index> joined = ka;
        joined.push_back(kb.back());
        bool subsets_frequent = true;
        for (std::size_t drop = 0; drop + 2 < joined.size() && subsets_frequent; ++drop) {
          std::vector<Index> sub;
          for (std::size_t k = 0; k < joined.size(); ++k) {
            if (k != drop) sub.push_back(joined[k]);
          }
          subsets_frequent = level.count(sub) != 0;
        }
        if (!subsets_frequent) continue;
        Bits inter = intersect(a->second, columns[static_cast<std::size_t>(kb.back())]);
        const Index count = popcount(inter);
        if (count >= threshold) {
          out.push_back({joined, count});
          next.emplace(std::move(joined), std::move(inter));
        }
      }
    }
    level = std::move(next);
  }
  std::stable_sort(out.begin(), out.end(), [](const LfSet& x, const LfSet& y) {
    if (x.lfs.size() != y.lfs.size()) return x.lfs.size() < y.lfs.size();
    return x.lfs < y.lfs;
  });
  return out;
}

PearsonResult lf_pearson(const MatchMatrix& matches) {
  const Index n = matches.rows(), t = matches.cols();
  MatrixXd x = matches.cast<double>();
  if (n > 0) x.rowwise() -= x.colwise().mean();
  const MatrixXd cov = x.transpose() * x;

  PearsonResult r;
  r.correlation = MatrixXd::Identity(t, t);
  r.constant.assign(static_cast<std::size_t>(t), false);
  for (Index j = 0; j < t; ++j) r.constant[static_cast<std::size_t>(j)] = !(cov(j, j) > 0.0);
  for (Index i = 0; i < t; ++i) {
    for (Index j = i + 1; j < t; ++j) {
      double c = 0.0;
      if (!r.constant[static_cast<std::size_t>(i)] && !r.constant[static_cast<std::size_t>(j)]) {
        c = std::clamp(cov(i, j) / std::sqrt(cov(i, i) * cov(j, j)), -1.0, 1.0);
      }
      r.correlation(i, j) = r.correlation(j, i) = c;
    }
  }
  return r;
}

CoverageStats coverage(const MatchMatrix& matches) {
  CoverageStats s;
  Index covered = 0;
  for (Index i = 0; i < matches.rows(); ++i) {
    Index row = 0;
    for (Index j = 0; j < matches.cols(); ++j) row += matches(i, j) != 0;
    s.total_matches += row;
    covered += row > 0;
  }
  if (matches.rows() > 0) {
    s.matches_per_sample = static_cast<double>(s.total_matches) / static_cast<double>(matches.rows());
    s.covered_fraction = static_cast<double>(covered) / static_cast<double>(matches.rows());
  }
  return s;
}

}  // namespace wsnf::data
