#ifndef WSNF_DATA_DATASET_HPP
#define WSNF_DATA_DATASET_HPP

#include "wsnf/core/error.hpp"
#include "wsnf/core/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wsnf::data {

enum class DataErrorKind { DimensionMismatch, NonBinaryMatch, UnknownClass, Format, EmptyResult };

class DataError : public Error {
 public:
  DataError(DataErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  DataErrorKind kind() const { return kind_; }

 private:
  DataErrorKind kind_;
};

/// Features, labeling-function matches and the LF -> class map.
struct WeakDataset {
  MatrixXd features;                 // n x d
  MatchMatrix matches;               // n x t, entries 0/1
  std::vector<Index> lf_to_class;    // t
  std::vector<std::string> class_names;
  std::vector<std::string> lf_names;
  std::optional<std::vector<Index>> gold;
  std::string split = "train";

  Index size() const { return features.rows(); }
  Index feature_dim() const { return features.cols(); }
  Index num_lfs() const { return matches.cols(); }
  Index num_classes() const { return static_cast<Index>(class_names.size()); }

  bool matched(Index row) const;
  std::vector<Index> lfs_matching(Index row) const;
  std::vector<Index> match_counts() const;
};

/// Throws DataError on any violated invariant.
void validate(const WeakDataset& ds);

/// Builds and validates a dataset from a real-valued match matrix; any entry
/// other than exactly 0 or 1 is rejected as a non-binary match.
WeakDataset make_dataset(MatrixXd features, const MatrixXd& matches, std::vector<Index> lf_to_class,
                         std::vector<std::string> class_names,
                         std::optional<std::vector<Index>> gold = std::nullopt);

/// Default names ("lf0", "class0", ...) for any empty name list.
void fill_default_names(WeakDataset& ds);

WeakDataset select_rows(const WeakDataset& ds, std::span<const Index> rows);

/// Stacks two datasets with the same LF layout.
WeakDataset concat_rows(const WeakDataset& a, const WeakDataset& b);

}  // namespace wsnf::data

#endif  // WSNF_DATA_DATASET_HPP
