#include "support/blobs.hpp"
#include "support/tempdir.hpp"
#include "wsnf/eval/inspect.hpp"
#include "wsnf/eval/metrics.hpp"
#include "wsnf/eval/report.hpp"
#include "wsnf/weak/train.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace wsnf::eval {
namespace {

using V = std::vector<Index>;

TEST(Accuracy, Examples) {
  EXPECT_EQ(accuracy(V{0, 1, 2}, V{0, 1, 2}), 1.0);
  EXPECT_EQ(accuracy(V{0, 1, 1, 1}, V{0, 1, 1, 0}), 0.75);
  EXPECT_EQ(accuracy(V{1, 1}, V{0, 0}), 0.0);
  EXPECT_THROW(accuracy(V{}, V{}), Error);
  EXPECT_THROW(accuracy(V{0}, V{0, 1}), ShapeError);
}

TEST(MacroF1, HandExample) {
  // Class 0: tp 1, fp 1, fn 0 -> 2/3.  Class 1: tp 2, fp 0, fn 1 -> 4/5.
  const auto f = macro_f1(V{0, 0, 1, 1}, V{0, 1, 1, 1}, 2);
  EXPECT_NEAR(f.per_class[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(f.per_class[1], 4.0 / 5.0, 1e-15);
  EXPECT_NEAR(f.score, 0.7333333333333333, 1e-15);
}

TEST(MacroF1, PerfectSkewedAndAbsent) {
  EXPECT_EQ(macro_f1(V{0, 1, 1}, V{0, 1, 1}, 2).score, 1.0);
  V gold(7, 0);
  gold[0] = 1;  // 1:6 imbalance
  const V pred(7, 0);
  EXPECT_LT(macro_f1(pred, gold, 2).score, accuracy(pred, gold) - 0.3);
  const auto f = macro_f1(V{0, 1}, V{0, 1}, 3);
  EXPECT_EQ(f.absent_classes, V{2});
  EXPECT_NEAR(f.score, 2.0 / 3.0, 1e-15);
  EXPECT_THROW(macro_f1(V{}, V{}, 2), Error);
}

// ---- LF prediction statistics ----------------------------------------------

double pct(Index a, Index b) { return b == 0 ? 0.0 : 100.0 * (static_cast<double>(a) / static_cast<double>(b)); }

TEST(LfStats, PerfectAndEmptyPredictions) {
  MatchMatrix m(4, 2);
  m << 1, 0, 0, 1, 1, 1, 0, 0;
  const auto perfect = lf_prediction_stats(m.cast<double>(), m);
  for (const auto& s : perfect.per_lf) {
    EXPECT_EQ(s.precision, 100.0);
    EXPECT_EQ(s.recall, 100.0);
    EXPECT_EQ(s.f1, 100.0);
  }
  EXPECT_EQ(perfect.weighted_f1, 100.0);
  EXPECT_EQ(perfect.cell_accuracy, 100.0);
  EXPECT_EQ(perfect.gold_coverage, 0.5);

  const auto none = lf_prediction_stats(MatrixXd::Zero(4, 2), m);
  for (const auto& s : none.per_lf) {
    EXPECT_EQ(s.recall, 0.0);
    EXPECT_EQ(s.coverage, 0.0);
  }
  EXPECT_EQ(none.predicted_coverage, 0.0);
}

TEST(LfStats, ThresholdIsInclusive) {
  MatchMatrix m(2, 1);
  m << 1, 1;
  MatrixXd p(2, 1);
  p << 0.5, std::nextafter(0.5, 0.0);
  const auto s = lf_prediction_stats(p, m);
  EXPECT_EQ(s.per_lf[0].counts, (Confusion{1, 0, 1, 0}));
}

TEST(LfStats, MatchesConfusionOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.index(100)), t = 1 + static_cast<Index>(rng.index(6));
    MatrixXd p(n, t);
    MatchMatrix m(n, t);
    for (Index i = 0; i < p.size(); ++i) {
      // Some cells sit exactly on the threshold.
      p.data()[i] = rng.uniform() < 0.1 ? 0.5 : rng.uniform();
      m.data()[i] = rng.uniform() < 0.3 ? 1 : 0;
    }
    const auto s = lf_prediction_stats(p, m);
    ASSERT_EQ(static_cast<Index>(s.per_lf.size()), t);
    const auto pred = (p.array() >= 0.5).cast<Index>();
    const auto gold = m.cast<Index>().array();
    double wp = 0, wr = 0, wf = 0;
    Index support_all = 0;
    for (Index j = 0; j < t; ++j) {
      const Index tp = (pred.col(j) * gold.col(j)).sum();
      const Index fp = (pred.col(j) * (1 - gold.col(j))).sum();
      const Index fn = ((1 - pred.col(j)) * gold.col(j)).sum();
      const Index tn = n - tp - fp - fn;
      const auto& st = s.per_lf[static_cast<std::size_t>(j)];
      EXPECT_EQ(st.counts, (Confusion{tp, fp, fn, tn}));
      const double prec = pct(tp, tp + fp), rec = pct(tp, tp + fn);
      EXPECT_EQ(st.precision, prec);
      EXPECT_EQ(st.recall, rec);
      EXPECT_EQ(st.f1, prec + rec == 0 ? 0.0 : 2.0 * prec * rec / (prec + rec));
      EXPECT_EQ(st.coverage, static_cast<double>(tp + fp) / static_cast<double>(n));
      EXPECT_EQ(st.no_support, tp + fn == 0);
      wp += static_cast<double>(tp + fn) * prec;
      wr += static_cast<double>(tp + fn) * rec;
      wf += static_cast<double>(tp + fn) * st.f1;
      support_all += tp + fn;
    }
    if (support_all > 0) {
      EXPECT_EQ(s.weighted_precision, wp / static_cast<double>(support_all));
      EXPECT_EQ(s.weighted_recall, wr / static_cast<double>(support_all));
      EXPECT_EQ(s.weighted_f1, wf / static_cast<double>(support_all));
    }
    const double cells = static_cast<double>(n * t);
    EXPECT_EQ(s.cell_accuracy, 100.0 * (static_cast<double>((pred == gold).count()) / cells));
    EXPECT_EQ(s.gold_coverage, static_cast<double>(gold.sum()) / cells);
    EXPECT_EQ(s.predicted_coverage, static_cast<double>(pred.sum()) / cells);
  }
}

// ---- rankings --------------------------------------------------------------

TEST(Ranking, FullSortStableOnTies) {
  VectorXd v(5);
  v << 0.1, 3.0, 0.1, -2.0, 3.0;
  EXPECT_EQ(rank_descending(v), (V{1, 4, 0, 2, 3}));
  EXPECT_EQ(rank_ascending(v), (V{3, 0, 2, 1, 4}));
}

TEST(Ranking, TopKTruncatesAndCarriesLabels) {
  MatrixXd logp(3, 2);
  logp << -1, -5, -3, -2, -2, -4;
  const V pred{0, 1, 0};
  const std::optional<V> gold = V{1, 1, 0};
  const auto r = topk_density_examples(logp, pred, gold, 10);
  ASSERT_EQ(r.size(), 2u);
  ASSERT_EQ(r[0].most_likely.size(), 3u);
  EXPECT_EQ(r[0].most_likely[0].row, 0);
  EXPECT_EQ(r[0].most_likely[1].row, 2);
  EXPECT_EQ(r[0].most_unlikely[0].row, 1);
  EXPECT_EQ(r[1].most_likely[0].row, 1);
  EXPECT_EQ(r[1].most_likely[0].log_density, -2.0);
  EXPECT_EQ(r[1].most_likely[0].predicted, 1);
  EXPECT_EQ(*r[1].most_likely[0].gold, 1);
  EXPECT_EQ(topk_density_examples(logp, pred, std::nullopt, 1)[0].most_likely.size(), 1u);
}

TEST(Ranking, TopKComesFromTheLfsOwnBlob) {
  const auto train = testing::two_blobs(400, 2);
  weak::TrainConfig cfg;
  cfg.embedding_dim = 4;
  cfg.hidden = {32, 32};
  cfg.depth = 4;
  cfg.epochs = 20;
  cfg.learning_rate = 1e-3;
  cfg.seed = 3;
  const auto model = weak::train_standard(train, cfg).model;
  const auto test = testing::two_blobs(200, 4);
  const auto r = topk_density_examples(model, test, 10, aggregate::Scheme::Max);
  Index own = 0, total = 0;
  for (const auto& lf : r) {
    for (const auto& e : lf.most_likely) {
      own += *e.gold == model.lf_to_class[static_cast<std::size_t>(lf.lf)];
      ++total;
    }
  }
  EXPECT_EQ(total, 20);
  EXPECT_GE(static_cast<double>(own) / static_cast<double>(total), 0.9);
}

// ---- reports ---------------------------------------------------------------

TEST(Report, NonFiniteNumbersAreStrings) {
  EXPECT_EQ(number(1.5), Json(1.5));
  EXPECT_EQ(number(std::numeric_limits<double>::infinity()), Json("inf"));
  EXPECT_EQ(number(-std::numeric_limits<double>::infinity()), Json("-inf"));
  EXPECT_EQ(number(std::nan("")), Json("nan"));
}

TEST(Report, DatasetHashTracksContent) {
  auto ds = testing::two_blobs(20, 5);
  const auto h = dataset_hash(ds);
  EXPECT_EQ(h, dataset_hash(testing::two_blobs(20, 5)));
  ds.matches(3, 0) = 1 - ds.matches(3, 0);
  EXPECT_NE(h, dataset_hash(ds));
}

TEST(Report, JsonFileRoundTrip) {
  testing::TempDir dir;
  Json j = report_header("test", 9);
  j["metrics"] = classification_json(V{0, 0, 1, 1}, V{0, 1, 1, 1}, 2);
  write_json(dir / "r.json", j);
  EXPECT_EQ(read_json(dir / "r.json"), j);
  EXPECT_EQ(j["seed"], 9);
  EXPECT_THROW(read_json(dir / "missing.json"), IoError);
}

}  // namespace
}  // namespace wsnf::eval
