#include "wsnf/eval/metrics.hpp"

#include "wsnf/core/error.hpp"

namespace wsnf::eval {

namespace {

void check_pair(std::span<const Index> pred, std::span<const Index> gold) {
  if (pred.empty()) throw Error("metric on empty input");
  if (pred.size() != gold.size()) throw ShapeError("prediction and gold lengths differ");
}

double ratio(Index num, Index den) { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

double accuracy(std::span<const Index> pred, std::span<const Index> gold) {
  check_pair(pred, gold);
  Index hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == gold[i];
  return ratio(hits, static_cast<Index>(pred.size()));
}

MacroF1 macro_f1(std::span<const Index> pred, std::span<const Index> gold, Index num_classes) {
  check_pair(pred, gold);
  if (num_classes < 1) throw Error("macro_f1: no classes");
  std::vector<Index> tp(static_cast<std::size_t>(num_classes)), fp(tp), fn(tp);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const Index p = pred[i], g = gold[i];
    if (p < 0 || p >= num_classes || g < 0 || g >= num_classes) throw ShapeError("macro_f1: label out of range");
    if (p == g) {
      ++tp[static_cast<std::size_t>(p)];
    } else {
      ++fp[static_cast<std::size_t>(p)];
      ++fn[static_cast<std::size_t>(g)];
    }
  }
  MacroF1 out;
  for (Index y = 0; y < num_classes; ++y) {
    const auto c = static_cast<std::size_t>(y);
    if (tp[c] + fp[c] + fn[c] == 0) out.absent_classes.push_back(y);
    const double f1 = harmonic(ratio(tp[c], tp[c] + fp[c]), ratio(tp[c], tp[c] + fn[c]));
    out.per_class.push_back(f1);
    out.score += f1;
  }
  out.score /= static_cast<double>(num_classes);
  return out;
}

LfPredictionStats lf_prediction_stats(const MatrixXd& posteriors, const MatchMatrix& matches, double threshold) {
  if (posteriors.rows() != matches.rows() || posteriors.cols() != matches.cols()) {
    throw ShapeError("lf_prediction_stats: posterior and match shapes differ");
  }
  const Index n = matches.rows(), t = matches.cols();
  LfPredictionStats out;
  Index support_total = 0, correct = 0, gold = 0, predicted = 0;
  for (Index j = 0; j < t; ++j) {
    LfStat s;
    for (Index i = 0; i < n; ++i) {
      const double p = posteriors(i, j);
      if (!(p >= 0.0 && p <= 1.0)) throw Error("lf_prediction_stats: posterior outside [0, 1]");
      const bool pred = p >= threshold;
      const bool match = matches(i, j) != 0;
      if (pred && match) ++s.counts.tp;
      else if (pred) ++s.counts.fp;
      else if (match) ++s.counts.fn;
      else ++s.counts.tn;
    }
    const auto& c = s.counts;
    const Index support = c.tp + c.fn;
    s.no_support = support == 0;
    s.precision = 100.0 * ratio(c.tp, c.tp + c.fp);
    s.recall = 100.0 * ratio(c.tp, support);
    s.f1 = harmonic(s.precision, s.recall);
    s.coverage = ratio(c.tp + c.fp, n);
    out.weighted_precision += static_cast<double>(support) * s.precision;
    out.weighted_recall += static_cast<double>(support) * s.recall;
    out.weighted_f1 += static_cast<double>(support) * s.f1;
    support_total += support;
    correct += c.tp + c.tn;
    gold += support;
    predicted += c.tp + c.fp;
    out.per_lf.push_back(s);
  }
  if (support_total > 0) {
    out.weighted_precision /= static_cast<double>(support_total);
    out.weighted_recall /= static_cast<double>(support_total);
    out.weighted_f1 /= static_cast<double>(support_total);
  }
  out.cell_accuracy = 100.0 * ratio(correct, n * t);
  out.gold_coverage = ratio(gold, n * t);
  out.predicted_coverage = ratio(predicted, n * t);
  return out;
}

}  // namespace wsnf::eval
