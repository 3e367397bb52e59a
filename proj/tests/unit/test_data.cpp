#include "support/tempdir.hpp"
#include "wsnf/core/rng.hpp"
#include "wsnf/data/analysis.hpp"
#include "wsnf/data/io.hpp"
#include "wsnf/data/preprocess.hpp"
#include "wsnf/data/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace wsnf::data {
namespace {

using testing::TempDir;

WeakDataset tiny() {
  MatrixXd x(3, 2);
  x << 0.0, 1.0, -0.0, 1e-310, 2.5, -3.25;
  MatrixXd m(3, 3);
  m << 1, 0, 0, 0, 1, 1, 0, 0, 0;
  return make_dataset(x, m, {0, 1, 1}, {"neg", "pos"}, std::vector<Index>{0, 1, 1});
}

template <typename Fn>
DataErrorKind error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no DataError thrown";
  return DataErrorKind::Format;
}

void expect_bit_equal(const MatrixXd& a, const MatrixXd& b) {
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  EXPECT_EQ(0, std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())));
}

// ---- validation -------------------------------------------------------------

TEST(Dataset, RejectsNonBinaryMatches) {
  MatrixXd m(2, 1);
  m << 1, 0.5;
  try {
    make_dataset(MatrixXd::Zero(2, 1), m, {0}, {"a"});
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.kind(), DataErrorKind::NonBinaryMatch);
    EXPECT_NE(std::string(e.what()).find("non-binary match"), std::string::npos);
  }
}

TEST(Dataset, RejectsRowMismatchAndUnknownClasses) {
  EXPECT_EQ(error_kind([] { make_dataset(MatrixXd::Zero(3, 1), MatrixXd::Zero(2, 1), {0}, {"a"}); }),
            DataErrorKind::DimensionMismatch);
  EXPECT_EQ(error_kind([] { make_dataset(MatrixXd::Zero(2, 1), MatrixXd::Zero(2, 1), {4}, {"a", "b"}); }),
            DataErrorKind::UnknownClass);
  EXPECT_EQ(error_kind([] {
              make_dataset(MatrixXd::Zero(2, 1), MatrixXd::Zero(2, 1), {0}, {"a"}, std::vector<Index>{0, 1});
            }),
            DataErrorKind::UnknownClass);
}

TEST(Dataset, RowHelpers) {
  const auto ds = tiny();
  EXPECT_TRUE(ds.matched(0));
  EXPECT_FALSE(ds.matched(2));
  EXPECT_EQ(ds.lfs_matching(1), (std::vector<Index>{1, 2}));
  EXPECT_EQ(ds.match_counts(), (std::vector<Index>{1, 1, 1}));
}

// ---- io --------------------------------------------------------------------

TEST(Io, SaveLoadIsBitExact) {
  TempDir dir;
  const auto ds = tiny();
  const auto path = save(ds, dir.path(), "train", {"enc", "dedup"});
  const auto back = load(path);
  expect_bit_equal(ds.features, back.features);
  EXPECT_EQ(ds.matches, back.matches);
  EXPECT_EQ(ds.lf_to_class, back.lf_to_class);
  EXPECT_EQ(ds.class_names, back.class_names);
  EXPECT_EQ(ds.gold, back.gold);
  const auto m = read_manifest(path);
  EXPECT_EQ(m.encoder, "enc");
  EXPECT_EQ(m.preprocessing, "dedup");
  EXPECT_EQ(m.n, 3);
  EXPECT_EQ(m.t, 3);
}

TEST(Io, RandomRoundTrips) {
  TempDir dir;
  Rng rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.index(40)), d = 1 + static_cast<Index>(rng.index(5)),
                t = 1 + static_cast<Index>(rng.index(6));
    MatrixXd x(n, d), m(n, t);
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal() * 1e3;
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform() < 0.3 ? 1.0 : 0.0;
    std::vector<Index> map(static_cast<std::size_t>(t));
    for (auto& c : map) c = static_cast<Index>(rng.index(3));
    const auto ds = make_dataset(x, m, map, {"a", "b", "c"});
    const auto back = load(save(ds, dir.path(), "r" + std::to_string(trial)));
    expect_bit_equal(ds.features, back.features);
    EXPECT_EQ(ds.matches, back.matches);
    EXPECT_FALSE(back.gold.has_value());
  }
}

TEST(Io, DistinctLoadErrors) {
  TempDir dir;
  const auto path = save(tiny(), dir.path(), "train");
  const auto features = dir / "train.features.f64";
  const auto matches = dir / "train.matches.u8";

  {  // truncated feature payload
    TempDir other;
    const auto p = save(tiny(), other.path(), "train");
    std::filesystem::resize_file(other / "train.features.f64", 8);
    EXPECT_EQ(error_kind([&] { load(p); }), DataErrorKind::DimensionMismatch);
  }
  {  // byte 2 in the match payload
    std::fstream f(matches, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(1);
    f.put(static_cast<char>(2));
  }
  EXPECT_EQ(error_kind([&] { load(path); }), DataErrorKind::NonBinaryMatch);

  {  // class id outside the class list
    TempDir other;
    const auto p = save(tiny(), other.path(), "train");
    auto m = read_manifest(p);
    m.lf_to_class[0] = 7;
    write_manifest(p, m);
    EXPECT_EQ(error_kind([&] { load(p); }), DataErrorKind::UnknownClass);
  }
  {
    std::ofstream bad(dir / "bad.manifest");
    bad << "something else\n";
  }
  EXPECT_EQ(error_kind([&] { load(dir / "bad.manifest"); }), DataErrorKind::Format);
  EXPECT_THROW(load(dir / "missing.manifest"), IoError);
  (void)features;
}

// ---- preprocessing ---------------------------------------------------------

TEST(Dedup, MergesMatchesOfDuplicates) {
  MatrixXd x(3, 2);
  x << 1, 2, 1, 2, 3, 4;
  MatrixXd m(3, 2);
  m << 1, 0, 0, 1, 0, 0;
  const auto r = deduplicate(make_dataset(x, m, {0, 1}, {"a", "b"}));
  EXPECT_EQ(r.removed, 1);
  ASSERT_EQ(r.dataset.size(), 2);
  EXPECT_EQ(r.dataset.matches(0, 0), 1);
  EXPECT_EQ(r.dataset.matches(0, 1), 1);
  EXPECT_EQ(r.dataset.features.row(1), x.row(2));
}

TEST(Dedup, UniqueDataUnchangedAndIdempotent) {
  const auto ds = tiny();
  const auto once = deduplicate(ds);
  EXPECT_EQ(once.removed, 0);
  EXPECT_EQ(once.dataset.matches, ds.matches);

  // 100 distinct rows, each repeated 2.5 times on average: 60% duplicates.
  Rng rng(2);
  MatrixXd x(250, 2);
  for (Index i = 0; i < 250; ++i) {
    const Index src = i < 100 ? i : static_cast<Index>(rng.index(100));
    x(i, 0) = static_cast<double>(src);
    x(i, 1) = -static_cast<double>(src);
  }
  const auto r = deduplicate(make_dataset(x, MatrixXd::Zero(250, 1), {0}, {"a"}));
  EXPECT_EQ(r.removed, 150);
  EXPECT_EQ(r.dataset.size(), 100);
  EXPECT_EQ(deduplicate(r.dataset).removed, 0);
}

TEST(Dedup, DistinguishesSignedZero) {
  MatrixXd x(2, 1);
  x << 0.0, -0.0;
  EXPECT_EQ(deduplicate(make_dataset(x, MatrixXd::Zero(2, 1), {0}, {"a"})).removed, 0);
}

TEST(FilterRareLfs, DropsAndRemaps) {
  MatrixXd m = MatrixXd::Zero(60, 3);
  m.block(0, 0, 50, 1).setOnes();
  m.block(0, 1, 3, 1).setOnes();
  m.block(10, 2, 20, 1).setOnes();
  const auto ds = make_dataset(MatrixXd::Zero(60, 1), m, {0, 1, 1}, {"a", "b"});
  const auto r = filter_rare_lfs(ds, 5);
  EXPECT_EQ(r.old_to_new, (std::vector<Index>{0, -1, 1}));
  EXPECT_EQ(r.dataset.num_lfs(), 2);
  EXPECT_EQ(r.dataset.lf_to_class, (std::vector<Index>{0, 1}));
  EXPECT_EQ(r.dataset.lf_names, (std::vector<std::string>{ds.lf_names[0], ds.lf_names[2]}));
  const auto remapped = remap_lfs(ds, r.old_to_new);
  EXPECT_EQ(remapped.matches, r.dataset.matches);
  EXPECT_EQ(remapped.lf_to_class, r.dataset.lf_to_class);

  EXPECT_EQ(filter_rare_lfs(ds, 1).old_to_new, (std::vector<Index>{0, 1, 2}));
  EXPECT_EQ(error_kind([&] { filter_rare_lfs(ds, 1000); }), DataErrorKind::EmptyResult);
  EXPECT_THROW(filter_rare_lfs(ds, 0), ConfigError);
}

TEST(SplitMatched, PartitionsRows) {
  const auto ds = tiny();
  const auto s = split_matched(ds);
  EXPECT_EQ(s.matched_rows, (std::vector<Index>{0, 1}));
  EXPECT_EQ(s.unmatched_rows, (std::vector<Index>{2}));
  EXPECT_EQ(s.matched.size() + s.unmatched.size(), ds.size());
  EXPECT_EQ(s.unmatched.features.row(0), ds.features.row(2));

  MatrixXd all = MatrixXd::Ones(4, 1);
  EXPECT_EQ(split_matched(make_dataset(MatrixXd::Zero(4, 1), all, {0}, {"a"})).unmatched.size(), 0);
}

// ---- analysis --------------------------------------------------------------

MatchMatrix random_matches(Index n, Index t, double p, Rng& rng) {
  MatchMatrix m(n, t);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform() < p ? 1 : 0;
  return m;
}

TEST(Cooccurrence, DisjointGivesSingletons) {
  MatchMatrix m = MatchMatrix::Zero(4, 3);
  m(0, 0) = m(1, 1) = m(2, 2) = m(3, 0) = 1;
  const auto sets = cooccurrence_sets(m, 1);
  ASSERT_EQ(sets.size(), 3u);
  EXPECT_EQ(sets[0].lfs, (std::vector<Index>{0}));
  EXPECT_EQ(sets[0].count, 2);
}

TEST(Cooccurrence, PairAboveThreshold) {
  MatchMatrix m = MatchMatrix::Zero(20, 2);
  m.block(0, 0, 12, 2).setOnes();
  const auto sets = cooccurrence_sets(m, 10);
  ASSERT_EQ(sets.size(), 3u);
  EXPECT_EQ(sets[2].lfs, (std::vector<Index>{0, 1}));
  EXPECT_EQ(sets[2].count, 12);
  EXPECT_EQ(cooccurrence_sets(m, 13).size(), 2u);
}

TEST(Cooccurrence, MatchesBruteForceOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.index(200)), t = 1 + static_cast<Index>(rng.index(10));
    const Index threshold = 1 + static_cast<Index>(rng.index(15));
    const auto m = random_matches(n, t, 0.5, rng);
    std::vector<LfSet> oracle;
    for (unsigned mask = 1; mask < (1u << t); ++mask) {
      LfSet s;
      for (Index j = 0; j < t; ++j) {
        if (mask & (1u << j)) s.lfs.push_back(j);
      }
      for (Index i = 0; i < n; ++i) {
        bool all = true;
        for (Index j : s.lfs) all = all && m(i, j);
        s.count += all;
      }
      if (s.lfs.size() == 1 || s.count >= threshold) oracle.push_back(s);
    }
    std::sort(oracle.begin(), oracle.end(), [](const LfSet& a, const LfSet& b) {
      return a.lfs.size() != b.lfs.size() ? a.lfs.size() < b.lfs.size() : a.lfs < b.lfs;
    });
    EXPECT_EQ(cooccurrence_sets(m, threshold), oracle) << "trial " << trial;
  }
}

TEST(Pearson, IdenticalAndComplementaryColumns) {
  MatchMatrix m(4, 3);
  m << 1, 1, 0, 0, 0, 1, 1, 1, 0, 0, 0, 1;
  const auto r = lf_pearson(m);
  EXPECT_NEAR(r.correlation(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(r.correlation(0, 2), -1.0, 1e-12);
}

TEST(Pearson, MatchesTextbookFormula) {
  Rng rng(4);
  const auto m = random_matches(60, 6, 0.4, rng);
  const auto r = lf_pearson(m);
  const MatrixXd x = m.cast<double>();
  for (Index a = 0; a < 6; ++a) {
    EXPECT_DOUBLE_EQ(r.correlation(a, a), 1.0);
    for (Index b = 0; b < 6; ++b) {
      const double ma = x.col(a).mean(), mb = x.col(b).mean();
      double sab = 0, saa = 0, sbb = 0;
      for (Index i = 0; i < 60; ++i) {
        sab += (x(i, a) - ma) * (x(i, b) - mb);
        saa += (x(i, a) - ma) * (x(i, a) - ma);
        sbb += (x(i, b) - mb) * (x(i, b) - mb);
      }
      EXPECT_NEAR(r.correlation(a, b), sab / std::sqrt(saa * sbb), 1e-12);
      EXPECT_EQ(r.correlation(a, b), r.correlation(b, a));
    }
  }
}

TEST(Pearson, ConstantColumnsAreFlagged) {
  MatchMatrix m(3, 2);
  m << 1, 1, 0, 1, 1, 1;
  const auto r = lf_pearson(m);
  EXPECT_FALSE(r.constant[0]);
  EXPECT_TRUE(r.constant[1]);
  EXPECT_EQ(r.correlation(0, 1), 0.0);
  EXPECT_EQ(r.correlation(1, 1), 1.0);
}

TEST(Coverage, MatchesPerSample) {
  MatchMatrix m(3, 3);
  m << 1, 1, 0, 1, 1, 1, 0, 0, 1;
  const auto c = coverage(m);
  EXPECT_EQ(c.total_matches, 6);
  EXPECT_DOUBLE_EQ(c.matches_per_sample, 2.0);
  EXPECT_DOUBLE_EQ(c.covered_fraction, 1.0);
}

// ---- synthetic -------------------------------------------------------------

TEST(Synth, SameSeedSameData) {
  SynthSpec s;
  s.seed = 7;
  const auto a = synth_generate(s), b = synth_generate(s);
  expect_bit_equal(a.train.features, b.train.features);
  EXPECT_EQ(a.train.matches, b.train.matches);
  EXPECT_EQ(a.test.gold, b.test.gold);
  s.seed = 8;
  EXPECT_NE(synth_generate(s).train.matches, a.train.matches);
}

TEST(Synth, CleanFullCoverageAgreesWithGold) {
  SynthSpec s;
  s.noise = 0.0;
  s.coverage = 1.0;
  s.seed = 3;
  const auto d = synth_generate(s).train;
  for (Index i = 0; i < d.size(); ++i) {
    ASSERT_TRUE(d.matched(i));
    for (Index j : d.lfs_matching(i)) EXPECT_EQ(d.lf_to_class[static_cast<std::size_t>(j)], (*d.gold)[i]);
  }
}

TEST(Synth, CoverageControlsUnmatchedFraction) {
  SynthSpec s;
  s.coverage = 0.5;
  s.n_train = 2000;
  s.seed = 11;
  const auto d = synth_generate(s).train;
  Index unmatched = 0;
  for (Index i = 0; i < d.size(); ++i) unmatched += !d.matched(i);
  EXPECT_NEAR(static_cast<double>(unmatched) / 2000.0, 0.5, 0.02);
}

TEST(Synth, RejectsInfeasibleSpecs) {
  SynthSpec s;
  s.coverage = 1.2;
  EXPECT_THROW(synth_generate(s), ConfigError);
  s.coverage = 0.5;
  s.classes = 0;
  EXPECT_THROW(synth_generate(s), ConfigError);
}

}  // namespace
}  // namespace wsnf::data
