#ifndef WSNF_EVAL_REPORT_HPP
#define WSNF_EVAL_REPORT_HPP

#include "wsnf/aggregate/predict.hpp"
#include "wsnf/data/dataset.hpp"
#include "wsnf/eval/inspect.hpp"
#include "wsnf/eval/metrics.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace wsnf::eval {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportFormat = "wsnf-report 1";
inline constexpr const char* kVersion = "0.1.0";

/// FNV-1a over shapes, payload bytes, LF map and gold labels.
std::uint64_t dataset_hash(const data::WeakDataset& ds);

/// Finite values as numbers; infinities and NaN as the strings
/// "inf", "-inf", "nan" (JSON has no literal for them).
Json number(double v);

/// Common header: format, kind, version and the given hashes and seed.
Json report_header(const std::string& kind, std::uint64_t seed);

/// {"labels": [...], "scores": [[...]], "domain": ...}; posteriors are
/// included when present.
Json predictions_json(const aggregate::Predictions& p);

/// Label-only predictions (baselines).
Json labels_json(std::span<const Index> labels);

/// {"accuracy": ..., "macro_f1": ..., "per_class_f1": [...], ...}.
Json classification_json(std::span<const Index> pred, std::span<const Index> gold, Index num_classes);

Json lf_stats_json(const LfPredictionStats& stats, const std::vector<std::string>& lf_names);

Json rankings_json(const std::vector<LfRanking>& rankings, const std::vector<std::string>& lf_names);

/// Plain-text tables for terminals.
std::string classification_table(const Json& metrics);
std::string lf_stats_table(const LfPredictionStats& stats, const std::vector<std::string>& lf_names);

/// Pretty-printed with a trailing newline. Throws IoError.
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

}  // namespace wsnf::eval

#endif  // WSNF_EVAL_REPORT_HPP
