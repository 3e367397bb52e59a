#ifndef WSNF_EVAL_METRICS_HPP
#define WSNF_EVAL_METRICS_HPP

#include "wsnf/core/types.hpp"

#include <span>
#include <vector>

namespace wsnf::eval {

/// Fraction of exact matches. Throws on empty or unequal inputs.
double accuracy(std::span<const Index> pred, std::span<const Index> gold);

struct MacroF1 {
  double score = 0.0;
  std::vector<double> per_class;
  std::vector<Index> absent_classes;  // in neither pred nor gold; counted as F1 = 0
};

MacroF1 macro_f1(std::span<const Index> pred, std::span<const Index> gold, Index num_classes);

struct Confusion {
  Index tp = 0, fp = 0, fn = 0, tn = 0;
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// Per-LF match prediction quality. Matches are the gold events; an LF is
/// predicted for a row when its posterior is >= 0.5. Precision, recall, F1
/// and accuracy are percentages; coverages are fractions.
struct LfStat {
  Confusion counts;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double coverage = 0.0;    // predicted matches / n
  bool no_support = false;  // LF never matches; recall and F1 reported as 0
};

struct LfPredictionStats {
  std::vector<LfStat> per_lf;
  // Averages weighted by each LF's gold match count.
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  double cell_accuracy = 0.0;       // correct cells / (n * t)
  double gold_coverage = 0.0;       // matches / (n * t)
  double predicted_coverage = 0.0;  // #(posterior >= threshold) / (n * t)
};

inline constexpr double kLfThreshold = 0.5;

LfPredictionStats lf_prediction_stats(const MatrixXd& posteriors, const MatchMatrix& matches,
                                      double threshold = kLfThreshold);

}  // namespace wsnf::eval

#endif  // WSNF_EVAL_METRICS_HPP
