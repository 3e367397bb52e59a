#include "wsnf/data/dataset.hpp"

namespace wsnf::data {

bool WeakDataset::matched(Index row) const { return (matches.row(row).array() != 0).any(); }

std::vector<Index> WeakDataset::lfs_matching(Index row) const {
  std::vector<Index> out;
  for (Index j = 0; j < matches.cols(); ++j) {
    if (matches(row, j) != 0) out.push_back(j);
  }
  return out;
}

std::vector<Index> WeakDataset::match_counts() const {
  std::vector<Index> counts(static_cast<std::size_t>(matches.cols()), 0);
  for (Index i = 0; i < matches.rows(); ++i) {
    for (Index j = 0; j < matches.cols(); ++j) counts[static_cast<std::size_t>(j)] += matches(i, j) != 0;
  }
  return counts;
}

void validate(const WeakDataset& ds) {
  const Index n = ds.features.rows();
  if (ds.matches.rows() != n) {
    throw DataError(DataErrorKind::DimensionMismatch, "features have " + std::to_string(n) + " rows but matches have " +
                                                          std::to_string(ds.matches.rows()));
  }
  if (static_cast<Index>(ds.lf_to_class.size()) != ds.matches.cols()) {
    throw DataError(DataErrorKind::DimensionMismatch, "lf_to_class has " + std::to_string(ds.lf_to_class.size()) +
                                                          " entries for " + std::to_string(ds.matches.cols()) + " LFs");
  }
  if (!ds.lf_names.empty() && ds.lf_names.size() != ds.lf_to_class.size()) {
    throw DataError(DataErrorKind::DimensionMismatch, "lf_names length differs from LF count");
  }
  for (Index i = 0; i < ds.matches.size(); ++i) {
    if (ds.matches.data()[i] > 1) throw DataError(DataErrorKind::NonBinaryMatch, "non-binary match entry");
  }
  const Index c = ds.num_classes();
  for (Index y : ds.lf_to_class) {
    if (y < 0 || y >= c) throw DataError(DataErrorKind::UnknownClass, "LF mapped to unknown class id " + std::to_string(y));
  }
  if (ds.gold) {
    if (static_cast<Index>(ds.gold->size()) != n) {
      throw DataError(DataErrorKind::DimensionMismatch, "gold label count differs from row count");
    }
    for (Index y : *ds.gold) {
      if (y < 0 || y >= c) throw DataError(DataErrorKind::UnknownClass, "gold label " + std::to_string(y) + " out of range");
    }
  }
  if (!ds.features.allFinite()) throw DataError(DataErrorKind::Format, "non-finite feature value");
}

void fill_default_names(WeakDataset& ds) {
  if (ds.lf_names.empty()) {
    for (Index j = 0; j < ds.num_lfs(); ++j) ds.lf_names.push_back("lf" + std::to_string(j));
  }
}

WeakDataset make_dataset(MatrixXd features, const MatrixXd& matches, std::vector<Index> lf_to_class,
                         std::vector<std::string> class_names, std::optional<std::vector<Index>> gold) {
  WeakDataset ds;
  ds.matches.resize(matches.rows(), matches.cols());
  for (Index i = 0; i < matches.size(); ++i) {
    const double v = matches.data()[i];
    if (v != 0.0 && v != 1.0) {
      throw DataError(DataErrorKind::NonBinaryMatch, "non-binary match entry " + std::to_string(v));
    }
    ds.matches.data()[i] = static_cast<std::uint8_t>(v);
  }
  ds.features = std::move(features);
  ds.lf_to_class = std::move(lf_to_class);
  ds.class_names = std::move(class_names);
  ds.gold = std::move(gold);
  fill_default_names(ds);
  validate(ds);
  return ds;
}

WeakDataset select_rows(const WeakDataset& ds, std::span<const Index> rows) {
  WeakDataset out;
  out.features.resize(static_cast<Index>(rows.size()), ds.feature_dim());
  out.matches.resize(static_cast<Index>(rows.size()), ds.num_lfs());
  if (ds.gold) out.gold.emplace();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Index>(i);
    out.features.row(r) = ds.features.row(rows[i]);
    out.matches.row(r) = ds.matches.row(rows[i]);
    if (ds.gold) out.gold->push_back((*ds.gold)[static_cast<std::size_t>(rows[i])]);
  }
  out.lf_to_class = ds.lf_to_class;
  out.class_names = ds.class_names;
  out.lf_names = ds.lf_names;
  out.split = ds.split;
  return out;
}

WeakDataset concat_rows(const WeakDataset& a, const WeakDataset& b) {
  if (a.feature_dim() != b.feature_dim() || a.num_lfs() != b.num_lfs() || a.lf_to_class != b.lf_to_class) {
    throw DataError(DataErrorKind::DimensionMismatch, "cannot stack datasets with different layouts");
  }
  WeakDataset out = a;
  out.features.resize(a.size() + b.size(), a.feature_dim());
  out.features << a.features, b.features;
  out.matches.resize(a.size() + b.size(), a.num_lfs());
  out.matches << a.matches, b.matches;
  if (a.gold && b.gold) {
    out.gold->insert(out.gold->end(), b.gold->begin(), b.gold->end());
  } else {
    out.gold.reset();
  }
  return out;
}

}  // namespace wsnf::data
