#ifndef WSNF_AGGREGATE_AGGREGATE_HPP
#define WSNF_AGGREGATE_AGGREGATE_HPP

#include "wsnf/core/error.hpp"
#include "wsnf/core/types.hpp"
#include "wsnf/weak/variant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wsnf::aggregate {

enum class Scheme { Max, Union, NoisyOr, Simplex };

std::string_view scheme_name(Scheme s);
Scheme parse_scheme(std::string_view name);  // max | union | noisyor | simplex

/// Which schemes each variant supports:
///   S, I: max.   N: union, noisyor.   M: max, simplex.
/// Union and NoisyOr need P(lambda | x), which only the negative model has.
bool compatible(weak::Variant variant, Scheme scheme);
void require_compatible(weak::Variant variant, Scheme scheme);

/// Per-LF match frequency. Priors need not sum to one since LFs overlap.
template <typename Scalar>
struct LfPrior {
  std::vector<Scalar> p;
  std::string rule = "match-frequency clamped to [1/(n+2), 1-1/(n+2)]";
};

/// P(lambda) = (#rows matched by lambda) / n, clamped away from 0 and 1.
template <typename Derived>
LfPrior<double> estimate_lf_priors(const Eigen::MatrixBase<Derived>& matches) {
  const Index n = matches.rows();
  if (n < 1) throw Error("estimate_lf_priors: empty dataset");
  const double lo = 1.0 / static_cast<double>(n + 2);
  LfPrior<double> prior;
  for (Index j = 0; j < matches.cols(); ++j) {
    Index count = 0;
    for (Index i = 0; i < n; ++i) count += matches(i, j) != 0;
    const double f = static_cast<double>(count) / static_cast<double>(n);
    prior.p.push_back(std::min(std::max(f, lo), 1.0 - lo));
  }
  return prior;
}

/// Logistic function, evaluated without overflow for any finite input.
template <typename Scalar>
Scalar sigmoid(Scalar x) {
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

/// Two-hypothesis Bayes rule
///   P(lambda|x) = P(x|lambda)P(lambda) / (P(x|lambda)P(lambda) + P(x|~lambda)P(~lambda))
/// evaluated as sigmoid(log P(x|lambda) - log P(x|~lambda) + logit P(lambda)).
template <typename Scalar>
Scalar lf_posterior(Scalar logp_pos, Scalar logp_neg, Scalar prior) {
  if (!(prior > Scalar(0) && prior < Scalar(1))) throw Error("lf_posterior: prior must lie in (0, 1)");
  return sigmoid(logp_pos - logp_neg + std::log(prior) - std::log1p(-prior));
}

/// Element-wise posterior for n x t log-density matrices.
template <typename DerivedPos, typename DerivedNeg>
Matrix<typename DerivedPos::Scalar> lf_posteriors(const Eigen::MatrixBase<DerivedPos>& logp_pos,
                                                  const Eigen::MatrixBase<DerivedNeg>& logp_neg,
                                                  std::span<const typename DerivedPos::Scalar> priors) {
  using Scalar = typename DerivedPos::Scalar;
  if (logp_pos.rows() != logp_neg.rows() || logp_pos.cols() != logp_neg.cols() ||
      static_cast<Index>(priors.size()) != logp_pos.cols()) {
    throw ShapeError("lf_posteriors: shape mismatch");
  }
  Matrix<Scalar> out(logp_pos.rows(), logp_pos.cols());
  for (Index i = 0; i < out.rows(); ++i) {
    for (Index j = 0; j < out.cols(); ++j) {
      out(i, j) = lf_posterior(logp_pos(i, j), logp_neg(i, j), priors[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

enum class Domain { Log, Probability };

template <typename Scalar>
struct ClassScores {
  std::vector<Scalar> scores;
  Domain domain = Domain::Log;
  Index chosen = 0;
};

/// First index of the maximum; ties resolve to the lowest class id.
template <typename Scalar>
Index argmax(std::span<const Scalar> v) {
  Index best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[static_cast<std::size_t>(best)]) best = static_cast<Index>(i);
  }
  return best;
}

namespace detail {

template <typename Derived>
void check_lf_map(const Eigen::DenseBase<Derived>& values, std::span<const Index> lf_to_class, Index num_classes) {
  if (values.size() != static_cast<Index>(lf_to_class.size())) {
    throw ShapeError("aggregate: got " + std::to_string(values.size()) + " LF values for " +
                     std::to_string(lf_to_class.size()) + " LFs");
  }
  for (Index y : lf_to_class) {
    if (y < 0 || y >= num_classes) throw ShapeError("aggregate: LF mapped to unknown class");
  }
}

}  // namespace detail

/// Score per class = max log P(x | lambda) over the class's LFs; classes
/// without LFs score -inf.
template <typename Derived>
ClassScores<typename Derived::Scalar> predict_max(const Eigen::DenseBase<Derived>& log_densities,
                                                  std::span<const Index> lf_to_class, Index num_classes) {
  using Scalar = typename Derived::Scalar;
  detail::check_lf_map(log_densities, lf_to_class, num_classes);
  ClassScores<Scalar> out;
  out.domain = Domain::Log;
  out.scores.assign(static_cast<std::size_t>(num_classes), -std::numeric_limits<Scalar>::infinity());
  for (std::size_t j = 0; j < lf_to_class.size(); ++j) {
    auto& s = out.scores[static_cast<std::size_t>(lf_to_class[j])];
    s = std::max(s, static_cast<Scalar>(log_densities(static_cast<Index>(j))));
  }
  out.chosen = argmax<Scalar>(out.scores);
  return out;
}

/// Score per class = sum of P(lambda | x) over its LFs. The argmax uses the
/// raw sums; reported scores are normalized to sum to one when positive, and
/// uniform when every posterior is zero.
template <typename Derived>
ClassScores<typename Derived::Scalar> predict_union(const Eigen::DenseBase<Derived>& posteriors,
                                                    std::span<const Index> lf_to_class, Index num_classes) {
  using Scalar = typename Derived::Scalar;
  detail::check_lf_map(posteriors, lf_to_class, num_classes);
  ClassScores<Scalar> out;
  out.domain = Domain::Probability;
  out.scores.assign(static_cast<std::size_t>(num_classes), Scalar(0));
  for (std::size_t j = 0; j < lf_to_class.size(); ++j) {
    out.scores[static_cast<std::size_t>(lf_to_class[j])] += posteriors(static_cast<Index>(j));
  }
  out.chosen = argmax<Scalar>(out.scores);
  Scalar total = 0;
  for (Scalar s : out.scores) total += s;
  for (Scalar& s : out.scores) s = total > Scalar(0) ? s / total : Scalar(1) / static_cast<Scalar>(num_classes);
  return out;
}

/// 1 - prod(1 - p) over a set of probabilities, via sum(log1p(-p)).
template <typename Scalar>
Scalar noisy_or(std::span<const Scalar> p) {
  Scalar log_none = 0;
  for (Scalar v : p) {
    if (!(v >= Scalar(0) && v <= Scalar(1))) throw Error("noisy_or: probability outside [0, 1]");
    if (v == Scalar(1)) return Scalar(1);
    log_none += std::log1p(-v);
  }
  return -std::expm1(log_none);
}

/// Score per class = NoisyOr of the class's posteriors.
template <typename Derived>
ClassScores<typename Derived::Scalar> predict_noisyor(const Eigen::DenseBase<Derived>& posteriors,
                                                      std::span<const Index> lf_to_class, Index num_classes) {
  using Scalar = typename Derived::Scalar;
  detail::check_lf_map(posteriors, lf_to_class, num_classes);
  std::vector<std::vector<Scalar>> per_class(static_cast<std::size_t>(num_classes));
  for (std::size_t j = 0; j < lf_to_class.size(); ++j) {
    per_class[static_cast<std::size_t>(lf_to_class[j])].push_back(posteriors(static_cast<Index>(j)));
  }
  ClassScores<Scalar> out;
  out.domain = Domain::Probability;
  for (const auto& ps : per_class) out.scores.push_back(noisy_or<Scalar>(ps));
  out.chosen = argmax<Scalar>(out.scores);
  return out;
}

}  // namespace wsnf::aggregate

#endif  // WSNF_AGGREGATE_AGGREGATE_HPP
