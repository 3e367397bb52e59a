#ifndef WSNF_AGGREGATE_PREDICT_HPP
#define WSNF_AGGREGATE_PREDICT_HPP

#include "wsnf/aggregate/aggregate.hpp"
#include "wsnf/weak/model.hpp"

#include <vector>

namespace wsnf::aggregate {

struct Predictions {
  Scheme scheme = Scheme::Max;
  Domain domain = Domain::Log;
  std::vector<Index> labels;
  MatrixXd scores;         // n x classes, in `domain`
  MatrixXd log_densities;  // n x t, log P(x | lambda_j)
  MatrixXd posteriors;     // n x t, P(lambda_j | x); negative variant only
};

/// Class scores for every row of `x`. Throws CompatibilityError if the
/// model's variant cannot be aggregated with `scheme`.
Predictions predict(const weak::WeakModel& model, const MatrixXd& x, Scheme scheme);

/// For each class y, log P([x; mean of y's embeddings]); classes without
/// LFs score -inf.
MatrixXd simplex_scores(const weak::WeakModel& model, const MatrixXd& x);

}  // namespace wsnf::aggregate

#endif  // WSNF_AGGREGATE_PREDICT_HPP
