#ifndef WSNF_DATA_ANALYSIS_HPP
#define WSNF_DATA_ANALYSIS_HPP

#include "wsnf/core/types.hpp"

#include <vector>

namespace wsnf::data {

struct LfSet {
  std::vector<Index> lfs;  // ascending
  Index count = 0;         // rows matched by every member

  friend bool operator==(const LfSet&, const LfSet&) = default;
};

/// All singletons, plus every set of two or more LFs whose joint match count
/// is at least `threshold`. Ordered by size, then lexicographically.
std::vector<LfSet> cooccurrence_sets(const MatchMatrix& matches, Index threshold);

struct PearsonResult {
  MatrixXd correlation;        // t x t
  std::vector<bool> constant;  // column had zero variance; its off-diagonal entries are 0
};

PearsonResult lf_pearson(const MatchMatrix& matches);

struct CoverageStats {
  Index total_matches = 0;
  double matches_per_sample = 0.0;  // #matches / #samples
  double covered_fraction = 0.0;    // rows with >= 1 match
};

CoverageStats coverage(const MatchMatrix& matches);

}  // namespace wsnf::data

#endif  // WSNF_DATA_ANALYSIS_HPP
