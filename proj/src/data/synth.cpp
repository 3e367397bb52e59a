#include "wsnf/data/synth.hpp"

#include "wsnf/core/rng.hpp"

#include <cmath>
#include <numbers>

namespace wsnf::data {

namespace {

struct Layout {
  MatrixXd centers;  // (classes * lfs_per_class) x dim, one row per LF sub-blob
};

Layout make_layout(const SynthSpec& spec) {
  const Index t = spec.classes * spec.lfs_per_class;
  Layout l{MatrixXd::Zero(t, spec.dim)};
  const double two_pi = 2.0 * std::numbers::pi;
  for (Index c = 0; c < spec.classes; ++c) {
    const double a = two_pi * static_cast<double>(c) / static_cast<double>(spec.classes);
    for (Index k = 0; k < spec.lfs_per_class; ++k) {
      const double b = a + two_pi * static_cast<double>(k) / static_cast<double>(spec.lfs_per_class);
      auto row = l.centers.row(c * spec.lfs_per_class + k);
      if (spec.dim >= 2) {
        row(0) = spec.class_radius * std::cos(a) + spec.lf_radius * std::cos(b);
        row(1) = spec.class_radius * std::sin(a) + spec.lf_radius * std::sin(b);
      } else {
        const double mid = 0.5 * static_cast<double>(spec.classes - 1);
        row(0) = spec.class_radius * (static_cast<double>(c) - mid) +
                 spec.lf_radius * (static_cast<double>(k) - 0.5 * static_cast<double>(spec.lfs_per_class - 1)) /
                     static_cast<double>(spec.lfs_per_class);
      }
    }
  }
  return l;
}

WeakDataset draw(const SynthSpec& spec, const Layout& layout, Index n, Rng& rng, const std::string& split) {
  const Index t = spec.classes * spec.lfs_per_class;
  WeakDataset ds;
  ds.split = split;
  ds.features.resize(n, spec.dim);
  ds.matches = MatchMatrix::Zero(n, t);
  ds.gold.emplace();
  for (Index i = 0; i < n; ++i) {
    const auto c = static_cast<Index>(rng.index(static_cast<std::uint64_t>(spec.classes)));
    const auto k = static_cast<Index>(rng.index(static_cast<std::uint64_t>(spec.lfs_per_class)));
    const Index home = c * spec.lfs_per_class + k;
    for (Index j = 0; j < spec.dim; ++j) ds.features(i, j) = layout.centers(home, j) + spec.blob_std * rng.normal();
    ds.gold->push_back(c);

    if (rng.uniform() >= spec.coverage) continue;
    if (spec.classes > 1 && rng.uniform() < spec.noise) {
      const auto other = static_cast<Index>(rng.index(static_cast<std::uint64_t>(t - spec.lfs_per_class)));
      Index lf = other;
      if (lf >= c * spec.lfs_per_class) lf += spec.lfs_per_class;
      ds.matches(i, lf) = 1;
      continue;
    }
    ds.matches(i, home) = 1;
    if (spec.lfs_per_class > 1 && rng.uniform() < spec.overlap) {
      ds.matches(i, c * spec.lfs_per_class + (k + 1) % spec.lfs_per_class) = 1;
    }
  }
  for (Index c = 0; c < spec.classes; ++c) {
    ds.class_names.push_back("class" + std::to_string(c));
    for (Index k = 0; k < spec.lfs_per_class; ++k) {
      ds.lf_to_class.push_back(c);
      ds.lf_names.push_back("lf" + std::to_string(c) + "_" + std::to_string(k));
    }
  }
  validate(ds);
  return ds;
}

}  // namespace

SynthData synth_generate(const SynthSpec& spec) {
  if (spec.classes < 1 || spec.lfs_per_class < 1 || spec.dim < 1 || spec.n_train < 0 || spec.n_test < 0) {
    throw ConfigError("synth: classes, lfs_per_class and dim must be positive");
  }
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(spec.coverage)) throw ConfigError("synth: coverage must lie in [0, 1]");
  if (!in_unit(spec.noise)) throw ConfigError("synth: noise must lie in [0, 1]");
  if (!in_unit(spec.overlap)) throw ConfigError("synth: overlap must lie in [0, 1]");
  if (!(spec.blob_std > 0.0)) throw ConfigError("synth: blob_std must be positive");

  const Layout layout = make_layout(spec);
  Rng rng(derive_seed(spec.seed, "synth"));
  SynthData out;
  out.train = draw(spec, layout, spec.n_train, rng, "train");
  out.test = draw(spec, layout, spec.n_test, rng, "test");
  return out;
}

}  // namespace wsnf::data
