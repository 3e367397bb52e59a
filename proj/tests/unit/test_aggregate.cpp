#include "support/blobs.hpp"
#include "support/gradcheck.hpp"
#include "wsnf/aggregate/predict.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace wsnf::aggregate {
namespace {

using weak::Variant;

constexpr double kInf = std::numeric_limits<double>::infinity();

RowVectorXd row(std::initializer_list<double> v) {
  RowVectorXd r(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

// ---- priors and posteriors -------------------------------------------------

TEST(Priors, MatchFrequencyWithClamp) {
  MatchMatrix m = MatchMatrix::Zero(100, 3);
  m.block(0, 0, 30, 1).setOnes();
  m.col(1).setOnes();
  const auto p = estimate_lf_priors(m).p;
  EXPECT_DOUBLE_EQ(p[0], 0.30);
  EXPECT_DOUBLE_EQ(p[1], 1.0 - 1.0 / 102.0);
  EXPECT_DOUBLE_EQ(p[2], 1.0 / 102.0);
  EXPECT_THROW(estimate_lf_priors(MatchMatrix(0, 2)), Error);
}

TEST(Posterior, WorkedExamples) {
  EXPECT_NEAR(lf_posterior(std::log(2.0), 0.0, 0.25), 0.4, 1e-15);
  EXPECT_DOUBLE_EQ(lf_posterior(-3.0, -3.0, 0.5), 0.5);
  EXPECT_THROW(lf_posterior(0.0, 0.0, 1.0), Error);
}

TEST(Posterior, MatchesNaiveBayesRule) {
  Rng rng(1);
  for (int k = 0; k < 1000; ++k) {
    const double lp = rng.uniform(-20, 20), ln = rng.uniform(-20, 20), prior = rng.uniform(0.001, 0.999);
    const double a = std::exp(lp) * prior, b = std::exp(ln) * (1 - prior);
    EXPECT_NEAR(lf_posterior(lp, ln, prior), a / (a + b), 1e-12);
  }
}

TEST(Posterior, MonotoneAndBoundedAtExtremes) {
  Rng rng(2);
  for (int k = 0; k < 200; ++k) {
    const double lp = rng.uniform(-5, 5), ln = rng.uniform(-5, 5), prior = rng.uniform(0.05, 0.95);
    const double base = lf_posterior(lp, ln, prior);
    EXPECT_LT(base, lf_posterior(lp + 0.1, ln, prior));
    EXPECT_GT(base, lf_posterior(lp, ln + 0.1, prior));
    EXPECT_LT(base, lf_posterior(lp, ln, prior + 0.01));
  }
  for (double lp : {-700.0, 700.0}) {
    for (double ln : {-700.0, 700.0}) {
      const double p = lf_posterior(lp, ln, 0.3);
      EXPECT_TRUE(std::isfinite(p));
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
  }
}

TEST(Posterior, MatrixFormMatchesScalar) {
  MatrixXd lp(2, 2), ln(2, 2);
  lp << 0, 1, 2, 3;
  ln << 1, 0, -1, 5;
  const std::vector<double> pri{0.2, 0.7};
  const MatrixXd post = lf_posteriors(lp, ln, std::span<const double>(pri));
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) EXPECT_EQ(post(i, j), lf_posterior(lp(i, j), ln(i, j), pri[static_cast<std::size_t>(j)]));
  }
}

// ---- max -------------------------------------------------------------------

TEST(Max, MaxThenArgmax) {
  const std::vector<Index> map{0, 0, 1};
  EXPECT_EQ(predict_max(row({-1, -3, -2}), map, 2).chosen, 0);
  EXPECT_EQ(predict_max(row({-5, -1, -2}), map, 2).chosen, 0);
  EXPECT_EQ(predict_max(row({-5, -3, -2}), map, 2).chosen, 1);
  const std::vector<Index> pair{0, 1};
  EXPECT_EQ(predict_max(row({-1.0, -2.0}), pair, 2).chosen, 0);
  EXPECT_EQ(predict_max(row({-2.0, -2.0}), pair, 2).chosen, 0);  // tie
}

TEST(Max, SingleLfAndEmptyClass) {
  const std::vector<Index> map{1};
  const auto s = predict_max(row({-1e300}), map, 3);
  EXPECT_EQ(s.chosen, 1);
  EXPECT_EQ(s.scores[0], -kInf);
  EXPECT_EQ(s.scores[2], -kInf);
}

TEST(Max, ArgmaxInvariantUnderMonotoneMaps) {
  Rng rng(3);
  const std::vector<Index> map{0, 1, 2, 0, 1, 2, 2};
  for (int k = 0; k < 200; ++k) {
    RowVectorXd v(7);
    for (Index j = 0; j < 7; ++j) v(j) = rng.uniform(-50, 50);
    const Index c = predict_max(v, map, 3).chosen;
    EXPECT_EQ(predict_max(RowVectorXd(v.array() + rng.uniform(-600, 600)), map, 3).chosen, c);
    EXPECT_EQ(predict_max(RowVectorXd(v.array().exp()), map, 3).chosen, c);
  }
}

// ---- union -----------------------------------------------------------------

TEST(Union, SumsPerClass) {
  const std::vector<Index> map{0, 0, 1};
  const auto s = predict_union(row({0.2, 0.3, 0.4}), map, 2);
  EXPECT_EQ(s.chosen, 0);
  EXPECT_NEAR(s.scores[0], 0.5 / 0.9, 1e-15);
  EXPECT_NEAR(s.scores[1], 0.4 / 0.9, 1e-15);
  EXPECT_EQ(s.domain, Domain::Probability);
}

TEST(Union, AllZeroIsUniform) {
  const std::vector<Index> map{0, 1, 2};
  const auto s = predict_union(row({0, 0, 0}), map, 3);
  EXPECT_EQ(s.chosen, 0);
  for (double v : s.scores) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
}

TEST(Union, PermutationWithinClassAndOracle) {
  Rng rng(4);
  const std::vector<Index> map{0, 1, 0, 1, 0};
  for (int k = 0; k < 1000; ++k) {
    RowVectorXd p(5);
    for (Index j = 0; j < 5; ++j) p(j) = rng.uniform();
    const auto s = predict_union(p, map, 2);
    const double a = p(0) + p(2) + p(4), b = p(1) + p(3);
    EXPECT_NEAR(s.scores[0], a / (a + b), 1e-12);
    EXPECT_NEAR(s.scores[1], b / (a + b), 1e-12);
    EXPECT_EQ(s.chosen, b > a ? 1 : 0);
    RowVectorXd q = p;
    std::swap(q(0), q(4));
    const auto sq = predict_union(q, map, 2);
    EXPECT_NEAR(sq.scores[0], s.scores[0], 1e-15);
    EXPECT_NEAR(sq.scores[1], s.scores[1], 1e-15);
  }
}

// ---- noisy-or --------------------------------------------------------------

TEST(NoisyOr, WorkedExamples) {
  EXPECT_EQ(noisy_or<double>(std::vector<double>{0.5, 0.5}), 0.75);
  EXPECT_DOUBLE_EQ(noisy_or<double>(std::vector<double>{0.0, 0.37}), 0.37);
  EXPECT_EQ(noisy_or<double>(std::vector<double>{1.0, 0.2}), 1.0);
  EXPECT_EQ(noisy_or<double>(std::vector<double>{0.3, 1.0}), 1.0);
  EXPECT_EQ(noisy_or<double>(std::vector<double>{}), 0.0);
  EXPECT_THROW(noisy_or<double>(std::vector<double>{1.5}), Error);
}

TEST(NoisyOr, MatchesProductOracleAndBounds) {
  Rng rng(5);
  const std::vector<Index> map{0, 0, 0, 1, 1};
  for (int k = 0; k < 1000; ++k) {
    RowVectorXd p(5);
    for (Index j = 0; j < 5; ++j) p(j) = rng.uniform();
    const auto s = predict_noisyor(p, map, 2);
    const double a = 1 - (1 - p(0)) * (1 - p(1)) * (1 - p(2)), b = 1 - (1 - p(3)) * (1 - p(4));
    EXPECT_NEAR(s.scores[0], a, 1e-12);
    EXPECT_NEAR(s.scores[1], b, 1e-12);
    EXPECT_GE(s.scores[0], std::max({p(0), p(1), p(2)}));
    EXPECT_GE(s.scores[1], std::max(p(3), p(4)));
  }
}

// ---- schemes and compatibility ---------------------------------------------

TEST(Schemes, NamesRoundTrip) {
  for (Scheme s : {Scheme::Max, Scheme::Union, Scheme::NoisyOr, Scheme::Simplex}) {
    EXPECT_EQ(parse_scheme(scheme_name(s)), s);
  }
  EXPECT_THROW(parse_scheme("average"), ConfigError);
}

TEST(Schemes, CompatibilityTable) {
  const struct {
    Variant v;
    bool max, uni, nor, simplex;
  } table[] = {{Variant::Standard, true, false, false, false},
               {Variant::Iterative, true, false, false, false},
               {Variant::Negative, false, true, true, false},
               {Variant::Mixed, true, false, false, true}};
  for (const auto& r : table) {
    EXPECT_EQ(compatible(r.v, Scheme::Max), r.max);
    EXPECT_EQ(compatible(r.v, Scheme::Union), r.uni);
    EXPECT_EQ(compatible(r.v, Scheme::NoisyOr), r.nor);
    EXPECT_EQ(compatible(r.v, Scheme::Simplex), r.simplex);
  }
  EXPECT_THROW(require_compatible(Variant::Standard, Scheme::Union), CompatibilityError);
}

// ---- model-level prediction ------------------------------------------------

weak::WeakModel model_for(Variant v, std::vector<Index> lf_to_class, std::uint64_t seed) {
  const Index t = static_cast<Index>(lf_to_class.size());
  Rng rng(seed);
  MatrixXd x(2 * t, 2), m = MatrixXd::Zero(2 * t, t);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  for (Index i = 0; i < 2 * t; ++i) m(i, i % t) = 1;
  weak::TrainConfig cfg;
  cfg.variant = v;
  cfg.embedding_dim = 3;
  cfg.depth = 4;
  cfg.hidden = {8};
  cfg.seed = seed;
  auto model = weak::init_model(data::make_dataset(x, m, lf_to_class, {"a", "b", "c"}), cfg);
  testing::perturb(model.params, rng, 0.3);
  return model;
}

MatrixXd random_points(Index n, std::uint64_t seed) {
  Rng rng(seed);
  MatrixXd x(n, 2);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = 2 * rng.normal();
  return x;
}

TEST(Predict, RejectsIncompatibleSchemes) {
  const auto s = model_for(Variant::Standard, {0, 1}, 6);
  const MatrixXd x = random_points(3, 7);
  EXPECT_THROW(predict(s, x, Scheme::Union), CompatibilityError);
  EXPECT_THROW(predict(s, x, Scheme::Simplex), CompatibilityError);
  EXPECT_NO_THROW(predict(s, x, Scheme::Max));
}

TEST(Predict, MaxUsesLogDensities) {
  const auto model = model_for(Variant::Standard, {0, 1, 1, 2}, 8);
  const MatrixXd x = random_points(25, 9);
  const auto p = predict(model, x, Scheme::Max);
  EXPECT_EQ(p.log_densities, weak::log_density_matrix(model, x));
  for (Index i = 0; i < x.rows(); ++i) {
    const auto s = predict_max(p.log_densities.row(i), model.lf_to_class, 3);
    EXPECT_EQ(p.labels[static_cast<std::size_t>(i)], s.chosen);
    EXPECT_EQ(p.labels[static_cast<std::size_t>(i)], weak::predict_standard(model, x.row(i)));
  }
}

TEST(Predict, NegativeModelPosteriors) {
  const auto model = model_for(Variant::Negative, {0, 0, 1}, 10);
  const MatrixXd x = random_points(25, 11);
  const auto u = predict(model, x, Scheme::Union);
  const auto n = predict(model, x, Scheme::NoisyOr);
  const MatrixXd oracle = lf_posteriors(weak::log_density_matrix(model, x), weak::negative_log_density_matrix(model, x),
                                        std::span<const double>(model.lf_priors));
  EXPECT_EQ(u.posteriors, oracle);
  for (Index i = 0; i < x.rows(); ++i) {
    EXPECT_EQ(u.labels[static_cast<std::size_t>(i)], predict_union(oracle.row(i), model.lf_to_class, 2).chosen);
    EXPECT_EQ(n.labels[static_cast<std::size_t>(i)], predict_noisyor(oracle.row(i), model.lf_to_class, 2).chosen);
  }
  EXPECT_TRUE((u.posteriors.array() >= 0).all() && (u.posteriors.array() <= 1).all());
}

TEST(Simplex, OneLfPerClassMatchesMax) {
  const auto model = model_for(Variant::Mixed, {0, 1, 2}, 12);
  const MatrixXd x = random_points(40, 13);
  const auto s = predict(model, x, Scheme::Simplex);
  const auto m = predict(model, x, Scheme::Max);
  EXPECT_EQ(s.labels, m.labels);
  EXPECT_TRUE(s.scores.isApprox(m.scores, 1e-12));
}

TEST(Simplex, CentroidOfClassEmbeddings) {
  auto model = model_for(Variant::Mixed, {0, 1, 0, 1}, 14);
  const MatrixXd x = random_points(10, 15);
  const MatrixXd scores = simplex_scores(model, x);
  const MatrixXd& e = model.positive();
  for (Index y = 0; y < 2; ++y) {
    const RowVectorXd centre = 0.5 * (e.row(y) + e.row(y + 2));
    MatrixXd joined(10, model.dim());
    joined << x, centre.replicate(10, 1);
    const VectorXd oracle = model.flow.log_prob(model.params, joined);
    for (Index i = 0; i < 10; ++i) EXPECT_NEAR(scores(i, y), oracle(i), 1e-12);
  }
  // Two identical embeddings: the centroid is either one.
  model.params.value(weak::kPositiveTable).row(2) = model.positive().row(0);
  const MatrixXd same = simplex_scores(model, x);
  const MatrixXd single = weak::log_density_matrix(model, x);
  for (Index i = 0; i < 10; ++i) EXPECT_NEAR(same(i, 0), single(i, 0), 1e-12);
}

TEST(Simplex, ClassWithoutLfsScoresMinusInfinity) {
  const auto model = model_for(Variant::Mixed, {0, 0}, 16);
  const MatrixXd scores = simplex_scores(model, random_points(3, 17));
  for (Index i = 0; i < 3; ++i) EXPECT_EQ(scores(i, 1), -kInf);
}

}  // namespace
}  // namespace wsnf::aggregate
