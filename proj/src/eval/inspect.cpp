#include "wsnf/eval/inspect.hpp"

#include <algorithm>
#include <numeric>

namespace wsnf::eval {

namespace {

template <typename Less>
std::vector<Index> ranked(const VectorXd& values, Less less) {
  std::vector<Index> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return less(values(a), values(b)); });
  return idx;
}

}  // namespace

std::vector<Index> rank_descending(const VectorXd& values) {
  return ranked(values, [](double a, double b) { return a > b; });
}

std::vector<Index> rank_ascending(const VectorXd& values) {
  return ranked(values, [](double a, double b) { return a < b; });
}

std::vector<LfRanking> topk_density_examples(const MatrixXd& log_densities, std::span<const Index> predicted,
                                             const std::optional<std::vector<Index>>& gold, Index k) {
  const Index n = log_densities.rows();
  if (static_cast<Index>(predicted.size()) != n) throw ShapeError("one predicted label per row expected");
  if (gold && static_cast<Index>(gold->size()) != n) throw ShapeError("one gold label per row expected");
  if (k < 0) throw ConfigError("k must be non-negative");
  const Index take = std::min(k, n);
  auto example = [&](Index row, double ld) {
    RankedExample e{row, ld, predicted[static_cast<std::size_t>(row)], std::nullopt};
    if (gold) e.gold = (*gold)[static_cast<std::size_t>(row)];
    return e;
  };
  std::vector<LfRanking> out;
  for (Index j = 0; j < log_densities.cols(); ++j) {
    const VectorXd col = log_densities.col(j);
    LfRanking r{j, {}, {}};
    const auto down = rank_descending(col);
    const auto up = rank_ascending(col);
    for (Index i = 0; i < take; ++i) {
      r.most_likely.push_back(example(down[static_cast<std::size_t>(i)], col(down[static_cast<std::size_t>(i)])));
      r.most_unlikely.push_back(example(up[static_cast<std::size_t>(i)], col(up[static_cast<std::size_t>(i)])));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<LfRanking> topk_density_examples(const weak::WeakModel& model, const data::WeakDataset& ds, Index k,
                                             aggregate::Scheme scheme) {
  const auto p = aggregate::predict(model, ds.features, scheme);
  return topk_density_examples(p.log_densities, p.labels, ds.gold, k);
}

}  // namespace wsnf::eval
