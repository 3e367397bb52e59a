#include "wsnf/eval/report.hpp"

#include "wsnf/core/hash.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wsnf::eval {

std::uint64_t dataset_hash(const data::WeakDataset& ds) {
  Fnv1a h;
  h.value(ds.size());
  h.value(ds.feature_dim());
  h.value(ds.num_lfs());
  h.value(ds.num_classes());
  h.bytes(ds.features.data(), static_cast<std::size_t>(ds.features.size()) * sizeof(double));
  h.bytes(ds.matches.data(), static_cast<std::size_t>(ds.matches.size()));
  for (Index c : ds.lf_to_class) h.value(c);
  if (ds.gold) {
    for (Index y : *ds.gold) h.value(y);
  }
  return h.digest();
}

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json report_header(const std::string& kind, std::uint64_t seed) {
  Json j;
  j["format"] = kReportFormat;
  j["kind"] = kind;
  j["version"] = kVersion;
  j["seed"] = seed;
  return j;
}

Json predictions_json(const aggregate::Predictions& p) {
  Json j;
  j["scheme"] = std::string(aggregate::scheme_name(p.scheme));
  j["domain"] = p.domain == aggregate::Domain::Log ? "log" : "probability";
  j["labels"] = p.labels;
  Json scores = Json::array();
  for (Index i = 0; i < p.scores.rows(); ++i) {
    Json row = Json::array();
    for (Index y = 0; y < p.scores.cols(); ++y) row.push_back(number(p.scores(i, y)));
    scores.push_back(std::move(row));
  }
  j["scores"] = std::move(scores);
  if (p.posteriors.size() > 0) {
    Json post = Json::array();
    for (Index i = 0; i < p.posteriors.rows(); ++i) {
      Json row = Json::array();
      for (Index l = 0; l < p.posteriors.cols(); ++l) row.push_back(number(p.posteriors(i, l)));
      post.push_back(std::move(row));
    }
    j["posteriors"] = std::move(post);
  }
  return j;
}

Json labels_json(std::span<const Index> labels) {
  Json j;
  j["labels"] = std::vector<Index>(labels.begin(), labels.end());
  return j;
}

Json classification_json(std::span<const Index> pred, std::span<const Index> gold, Index num_classes) {
  const auto f1 = macro_f1(pred, gold, num_classes);
  Json j;
  j["n"] = pred.size();
  j["accuracy"] = accuracy(pred, gold);
  j["macro_f1"] = f1.score;
  j["per_class_f1"] = f1.per_class;
  j["absent_classes"] = f1.absent_classes;
  return j;
}

Json lf_stats_json(const LfPredictionStats& stats, const std::vector<std::string>& lf_names) {
  Json j;
  j["threshold"] = kLfThreshold;
  j["units"] = "precision, recall, f1 and accuracy in percent; coverage as a fraction";
  j["weighting"] = "support-weighted (gold match count per LF)";
  j["accuracy_semantics"] = "cell-wise accuracy of binary match prediction";
  Json per = Json::array();
  for (std::size_t l = 0; l < stats.per_lf.size(); ++l) {
    const auto& s = stats.per_lf[l];
    Json e;
    e["lf"] = l < lf_names.size() ? lf_names[l] : std::to_string(l);
    e["tp"] = s.counts.tp;
    e["fp"] = s.counts.fp;
    e["fn"] = s.counts.fn;
    e["tn"] = s.counts.tn;
    e["precision"] = s.precision;
    e["recall"] = s.recall;
    e["f1"] = s.f1;
    e["coverage"] = s.coverage;
    e["no_support"] = s.no_support;
    per.push_back(std::move(e));
  }
  j["per_lf"] = std::move(per);
  j["weighted_precision"] = stats.weighted_precision;
  j["weighted_recall"] = stats.weighted_recall;
  j["weighted_f1"] = stats.weighted_f1;
  j["accuracy"] = stats.cell_accuracy;
  j["gold_coverage"] = stats.gold_coverage;
  j["predicted_coverage"] = stats.predicted_coverage;
  return j;
}

Json rankings_json(const std::vector<LfRanking>& rankings, const std::vector<std::string>& lf_names) {
  auto list = [](const std::vector<RankedExample>& xs) {
    Json a = Json::array();
    for (const auto& e : xs) {
      Json o;
      o["row"] = e.row;
      o["log_density"] = number(e.log_density);
      o["predicted"] = e.predicted;
      if (e.gold) o["gold"] = *e.gold;
      a.push_back(std::move(o));
    }
    return a;
  };
  Json out = Json::array();
  for (const auto& r : rankings) {
    Json o;
    const auto l = static_cast<std::size_t>(r.lf);
    o["lf"] = l < lf_names.size() ? lf_names[l] : std::to_string(r.lf);
    o["most_likely"] = list(r.most_likely);
    o["most_unlikely"] = list(r.most_unlikely);
    out.push_back(std::move(o));
  }
  return out;
}

namespace {

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string classification_table(const Json& metrics) {
  std::ostringstream out;
  out << "metric      value\n";
  out << "accuracy    " << fixed(metrics.at("accuracy").get<double>()) << '\n';
  out << "macro_f1    " << fixed(metrics.at("macro_f1").get<double>()) << '\n';
  const auto& per = metrics.at("per_class_f1");
  for (std::size_t y = 0; y < per.size(); ++y) {
    out << "f1[" << y << "]" << std::string(y < 10 ? 7 : 6, ' ') << fixed(per[y].get<double>()) << '\n';
  }
  return out.str();
}

std::string lf_stats_table(const LfPredictionStats& stats, const std::vector<std::string>& lf_names) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %9s %9s %9s %9s\n", "lf", "precision", "recall", "f1", "coverage");
  out << line;
  for (std::size_t l = 0; l < stats.per_lf.size(); ++l) {
    const auto& s = stats.per_lf[l];
    const std::string name = l < lf_names.size() ? lf_names[l] : std::to_string(l);
    std::snprintf(line, sizeof line, "%-16s %9.2f %9.2f %9.2f %9.4f%s\n", name.c_str(), s.precision, s.recall, s.f1,
                  s.coverage, s.no_support ? "  (no support)" : "");
    out << line;
  }
  std::snprintf(line, sizeof line, "%-16s %9.2f %9.2f %9.2f\n", "weighted", stats.weighted_precision,
                stats.weighted_recall, stats.weighted_f1);
  out << line;
  std::snprintf(line, sizeof line, "cell accuracy %.2f, gold coverage %.4f, predicted coverage %.4f\n",
                stats.cell_accuracy, stats.gold_coverage, stats.predicted_coverage);
  out << line;
  return out.str();
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace wsnf::eval
