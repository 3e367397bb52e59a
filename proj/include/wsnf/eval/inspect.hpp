#ifndef WSNF_EVAL_INSPECT_HPP
#define WSNF_EVAL_INSPECT_HPP

#include "wsnf/aggregate/predict.hpp"
#include "wsnf/data/dataset.hpp"

#include <optional>
#include <span>
#include <vector>

namespace wsnf::eval {

struct RankedExample {
  Index row = 0;
  double log_density = 0.0;
  Index predicted = 0;
  std::optional<Index> gold;
};

struct LfRanking {
  Index lf = 0;
  std::vector<RankedExample> most_likely;    // highest log density first
  std::vector<RankedExample> most_unlikely;  // lowest log density first
};

/// Row indices by descending value; equal values keep index order.
std::vector<Index> rank_descending(const VectorXd& values);

/// Row indices by ascending value; equal values keep index order.
std::vector<Index> rank_ascending(const VectorXd& values);

/// Per LF (column of `log_densities`), the k most and least likely rows.
/// k larger than the row count is truncated.
std::vector<LfRanking> topk_density_examples(const MatrixXd& log_densities, std::span<const Index> predicted,
                                             const std::optional<std::vector<Index>>& gold, Index k);

/// Same, with densities and predicted labels from `model` under `scheme`.
std::vector<LfRanking> topk_density_examples(const weak::WeakModel& model, const data::WeakDataset& ds, Index k,
                                             aggregate::Scheme scheme);

}  // namespace wsnf::eval

#endif  // WSNF_EVAL_INSPECT_HPP
