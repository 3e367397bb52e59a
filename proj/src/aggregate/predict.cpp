#include "wsnf/aggregate/predict.hpp"

#include <limits>

namespace wsnf::aggregate {

MatrixXd simplex_scores(const weak::WeakModel& model, const MatrixXd& x) {
  const Index k = model.num_classes, t = model.num_lfs();
  MatrixXd out(x.rows(), k);
  for (Index y = 0; y < k; ++y) {
    RowVectorXd alpha = RowVectorXd::Zero(t);
    Index members = 0;
    for (Index j = 0; j < t; ++j) {
      if (model.lf_to_class[static_cast<std::size_t>(j)] == y) {
        alpha(j) = 1.0;
        ++members;
      }
    }
    if (members == 0) {
      out.col(y).setConstant(-std::numeric_limits<double>::infinity());
      continue;
    }
    alpha /= static_cast<double>(members);
    out.col(y) = weak::log_density_mixed(model, x, alpha.replicate(x.rows(), 1));
  }
  return out;
}

Predictions predict(const weak::WeakModel& model, const MatrixXd& x, Scheme scheme) {
  require_compatible(model.variant, scheme);
  Predictions p;
  p.scheme = scheme;
  p.log_densities = weak::log_density_matrix(model, x);
  const Index n = x.rows(), k = model.num_classes;
  p.scores.resize(n, k);
  p.labels.resize(static_cast<std::size_t>(n));

  if (scheme == Scheme::Union || scheme == Scheme::NoisyOr) {
    const MatrixXd neg = weak::negative_log_density_matrix(model, x);
    if (static_cast<Index>(model.lf_priors.size()) != model.num_lfs()) throw Error("model has no LF priors");
    p.posteriors = lf_posteriors(p.log_densities, neg, std::span<const double>(model.lf_priors));
  }
  const MatrixXd simplex = scheme == Scheme::Simplex ? simplex_scores(model, x) : MatrixXd();

  for (Index i = 0; i < n; ++i) {
    ClassScores<double> cs;
    switch (scheme) {
      case Scheme::Max:
        cs = predict_max(p.log_densities.row(i), model.lf_to_class, k);
        break;
      case Scheme::Union:
        cs = predict_union(p.posteriors.row(i), model.lf_to_class, k);
        break;
      case Scheme::NoisyOr:
        cs = predict_noisyor(p.posteriors.row(i), model.lf_to_class, k);
        break;
      case Scheme::Simplex: {
        cs.domain = Domain::Log;
        cs.scores.assign(simplex.row(i).data(), simplex.row(i).data() + k);
        cs.chosen = argmax<double>(cs.scores);
        break;
      }
    }
    p.domain = cs.domain;
    p.labels[static_cast<std::size_t>(i)] = cs.chosen;
    for (Index y = 0; y < k; ++y) p.scores(i, y) = cs.scores[static_cast<std::size_t>(y)];
  }
  return p;
}

}  // namespace wsnf::aggregate
