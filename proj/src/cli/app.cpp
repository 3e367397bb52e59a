#include "wsnf/cli/app.hpp"

#include "wsnf/aggregate/predict.hpp"
#include "wsnf/baselines/baselines.hpp"
#include "wsnf/core/hash.hpp"
#include "wsnf/data/analysis.hpp"
#include "wsnf/data/io.hpp"
#include "wsnf/data/preprocess.hpp"
#include "wsnf/data/synth.hpp"
#include "wsnf/eval/report.hpp"
#include "wsnf/weak/train.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace wsnf::cli {

namespace fs = std::filesystem;
using eval::Json;

namespace {

constexpr const char* kExitCodes =
    "Exit codes: 0 ok, 1 unexpected error, 2 usage, 3 incompatible variant/scheme,\n"
    "            4 missing or unreadable file, 5 invalid dataset, 6 invalid config,\n"
    "            7 training diverged.\n"
    "Environment: WSNF_OUT_DIR sets the default output directory (--out wins).";

fs::path output_dir(const std::string& flag) {
  fs::path dir = ".";
  if (!flag.empty()) {
    dir = flag;
  } else if (const char* env = std::getenv("WSNF_OUT_DIR"); env != nullptr && *env != '\0') {
    dir = env;
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

data::WeakDataset load_dataset(const std::string& path) {
  if (!fs::exists(path)) throw IoError("no such file: " + path);
  return data::load(path);
}

weak::LoadedModel load_model(const std::string& path) {
  if (!fs::exists(path)) throw IoError("no such file: " + path);
  return weak::from_checkpoint(ad::load_checkpoint(path));
}

aggregate::Scheme default_scheme(weak::Variant v) {
  return v == weak::Variant::Negative ? aggregate::Scheme::NoisyOr : aggregate::Scheme::Max;
}

Json config_json(const weak::TrainConfig& cfg) {
  Json j = Json::object();
  std::istringstream text(weak::to_text(cfg));
  std::string line;
  std::getline(text, line);
  while (std::getline(text, line)) {
    const auto eq = line.find(" = ");
    j[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

void apply_settings(weak::TrainConfig& cfg, const std::vector<std::string>& settings) {
  for (const auto& s : settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + s + "'");
    weak::set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
}

void print_json_summary(std::ostream& out, const fs::path& path) { out << "wrote " << path.generic_string() << '\n'; }

// ---------------------------------------------------------------- synth

struct SynthArgs {
  data::SynthSpec spec;
  std::string out;
};

void add_synth(CLI::App& app, SynthArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sc = app.add_subcommand("synth", "Generate a seeded Gaussian-blob weak-supervision dataset");
  sc->add_option("--seed", a.spec.seed, "Random seed")->capture_default_str();
  sc->add_option("--classes", a.spec.classes, "Number of classes")->capture_default_str();
  sc->add_option("--lfs-per-class", a.spec.lfs_per_class, "Labeling functions per class")->capture_default_str();
  sc->add_option("--dim", a.spec.dim, "Feature dimension")->capture_default_str();
  sc->add_option("--n-train", a.spec.n_train, "Training rows")->capture_default_str();
  sc->add_option("--n-test", a.spec.n_test, "Test rows")->capture_default_str();
  sc->add_option("--coverage", a.spec.coverage, "Probability that a row is matched")->capture_default_str();
  sc->add_option("--noise", a.spec.noise, "Probability that a match points at another class")->capture_default_str();
  sc->add_option("--overlap", a.spec.overlap, "Probability of a second same-class match")->capture_default_str();
  sc->add_option("--out", a.out, "Output directory");
  sc->callback([&] {
    action = [&] {
      const auto ds = data::synth_generate(a.spec);
      const fs::path dir = output_dir(a.out);
      const data::Provenance prov{"synthetic-blobs", "none"};
      print_json_summary(out, data::save(ds.train, dir, "train", prov));
      print_json_summary(out, data::save(ds.test, dir, "test", prov));
    };
  });
}

// ---------------------------------------------------------------- prep

struct PrepArgs {
  std::string train;
  std::string test;
  std::string out;
  Index min_count = 5;
  bool no_dedup = false;
};

void add_prep(CLI::App& app, PrepArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sc = app.add_subcommand("prep", "Deduplicate the training split and drop rare labeling functions");
  sc->add_option("--train", a.train, "Training manifest")->required();
  sc->add_option("--test", a.test, "Optional evaluation manifest, remapped to the kept LFs");
  sc->add_option("--min-count", a.min_count, "Drop LFs with fewer training matches")->capture_default_str();
  sc->add_flag("--no-dedup", a.no_dedup, "Keep duplicate training rows");
  sc->add_option("--out", a.out, "Output directory");
  sc->callback([&] {
    action = [&] {
      auto train = load_dataset(a.train);
      Index removed = 0;
      if (!a.no_dedup) {
        auto d = data::deduplicate(train);
        train = std::move(d.dataset);
        removed = d.removed;
      }
      auto filtered = data::filter_rare_lfs(train, a.min_count);
      const Index dropped = static_cast<Index>(
          std::count(filtered.old_to_new.begin(), filtered.old_to_new.end(), Index{-1}));
      std::ostringstream steps;
      steps << (a.no_dedup ? "" : "dedup;") << "min_count=" << a.min_count;
      const data::Provenance prov{data::read_manifest(a.train).encoder, steps.str()};
      const fs::path dir = output_dir(a.out);
      print_json_summary(out, data::save(filtered.dataset, dir, "train", prov));
      if (!a.test.empty()) {
        const auto test = data::remap_lfs(load_dataset(a.test), filtered.old_to_new);
        print_json_summary(out, data::save(test, dir, "test", prov));
      }
      out << "removed " << removed << " duplicate rows, dropped " << dropped << " labeling functions\n";
    };
  });
}

// ---------------------------------------------------------------- train

struct ConfigArgs {
  std::string config;
  std::vector<std::string> settings;
  std::string variant;
  CLI::Option* seed_opt = nullptr;
  std::uint64_t seed = 0;
  CLI::Option* epochs_opt = nullptr;
  int epochs = 0;
  CLI::Option* lr_opt = nullptr;
  double lr = 0.0;

  void add(CLI::App* sc) {
    sc->add_option("--config", config, "Config file (wsnf-config 1)");
    sc->add_option("--set", settings, "Override a config key: key=value (repeatable)");
    sc->add_option("--variant", variant, "S | I | N | M");
    seed_opt = sc->add_option("--seed", seed, "Random seed");
    epochs_opt = sc->add_option("--epochs", epochs, "Training epochs");
    lr_opt = sc->add_option("--lr", lr, "Learning rate");
  }

  weak::TrainConfig resolve() const {
    weak::TrainConfig cfg;
    if (!config.empty()) {
      if (!fs::exists(config)) throw IoError("no such file: " + config);
      cfg = weak::load_config(config);
    }
    apply_settings(cfg, settings);
    if (!variant.empty()) cfg.variant = weak::parse_variant(variant);
    if (seed_opt->count()) cfg.seed = seed;
    if (epochs_opt->count()) cfg.epochs = epochs;
    if (lr_opt->count()) cfg.learning_rate = lr;
    return cfg;
  }
};

struct TrainArgs {
  std::string data;
  std::string out;
  ConfigArgs cfg;
};

Json train_record(const data::WeakDataset& ds, const weak::TrainConfig& cfg, const weak::TrainStats& stats) {
  Json j = eval::report_header("train", cfg.seed);
  j["config_hash"] = hex64(weak::config_hash(cfg));
  j["dataset_hash"] = hex64(eval::dataset_hash(ds));
  j["config"] = config_json(cfg);
  j["rows"] = ds.size();
  j["labeling_functions"] = ds.num_lfs();
  j["classes"] = ds.class_names;
  j["steps"] = stats.steps;
  j["skipped_negatives"] = stats.skipped_negatives;
  Json losses = Json::array();
  for (double l : stats.epoch_loss) losses.push_back(eval::number(l));
  j["epoch_loss"] = std::move(losses);
  return j;
}

void add_train(CLI::App& app, TrainArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sc = app.add_subcommand("train", "Train a labeling-function flow model");
  sc->add_option("--data", a.data, "Training manifest")->required();
  sc->add_option("--out", a.out, "Output directory (model.ckpt, run.json)");
  a.cfg.add(sc);
  sc->callback([&] {
    action = [&] {
      const auto cfg = a.cfg.resolve();
      const auto ds = load_dataset(a.data);
      cfg.validate(ds.num_lfs());
      Json record;
      weak::WeakModel model;
      if (cfg.variant == weak::Variant::Iterative) {
        auto it = weak::iterate(ds, cfg);
        record = train_record(ds, cfg, it.stats);
        record["rounds"] = it.rounds;
        record["final_train_rows"] = it.final_train_rows;
        record["unmatched_remaining"] = it.unmatched_remaining;
        model = std::move(it.model);
      } else {
        auto res = weak::train(ds, cfg);
        record = train_record(ds, cfg, res.stats);
        model = std::move(res.model);
      }
      const fs::path dir = output_dir(a.out);
      ad::save_checkpoint(dir / "model.ckpt", weak::to_checkpoint(model, cfg));
      eval::write_json(dir / "run.json", record);
      print_json_summary(out, dir / "model.ckpt");
      print_json_summary(out, dir / "run.json");
      if (!record["epoch_loss"].empty()) out << "final epoch loss " << record["epoch_loss"].back().dump() << '\n';
    };
  });
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
  std::string model;
  std::string data;
  std::string scheme;
  std::string out;
};

void add_predict(CLI::App& app, PredictArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sc = app.add_subcommand("predict", "Aggregate LF densities into class predictions");
  sc->add_option("--model", a.model, "Checkpoint from train")->required();
  sc->add_option("--data", a.data, "Manifest to predict")->required();
  sc->add_option("--scheme", a.scheme, "max | union | noisyor | simplex (default: max, noisyor for N)");
  sc->add_option("--out", a.out, "Output directory (predictions.json)");
  sc->callback([&] {
    action = [&] {
      const auto loaded = load_model(a.model);
      const auto& model = loaded.model;
      const auto scheme = a.scheme.empty() ? default_scheme(model.variant) : aggregate::parse_scheme(a.scheme);
      aggregate::require_compatible(model.variant, scheme);
      const auto ds = load_dataset(a.data);
      if (ds.feature_dim() != model.feature_dim || ds.num_lfs() != model.num_lfs()) {
        throw data::DataError(data::DataErrorKind::DimensionMismatch, "dataset does not fit the model's shape");
      }
      const auto p = aggregate::predict(model, ds.features, scheme);
      Json j = eval::report_header("predict", loaded.config.seed);
      j["config_hash"] = hex64(weak::config_hash(loaded.config));
      j["dataset_hash"] = hex64(eval::dataset_hash(ds));
      j["variant"] = std::string(1, weak::variant_tag(model.variant));
      j["rows"] = ds.size();
      j["classes"] = ds.class_names;
      j["lf_names"] = ds.lf_names;
      j["predictions"] = eval::predictions_json(p);
      if (ds.gold) {
        j["metrics"] = eval::classification_json(p.labels, *ds.gold, ds.num_classes());
        out << eval::classification_table(j["metrics"]);
      }
      if (p.posteriors.size() > 0) {
        j["lf_stats"] = eval::lf_stats_json(eval::lf_prediction_stats(p.posteriors, ds.matches), ds.lf_names);
      }
      const fs::path dir = output_dir(a.out);
      eval::write_json(dir / "predictions.json", j);
      print_json_summary(out, dir / "predictions.json");
    };
  });
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string predictions;
  std::string data;
  std::string out;
};

std::vector<Index> read_labels(const Json& j) {
  try {
    return j.at("predictions").at("labels").get<std::vector<Index>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("predictions file lacks labels: ") + e.what());
  }
}

MatrixXd read_posteriors(const Json& rows, Index n, Index t) {
  if (static_cast<Index>(rows.size()) != n) throw IoError("posterior row count differs from the dataset");
  MatrixXd post(n, t);
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != t) throw IoError("posterior width differs from the dataset");
    for (Index l = 0; l < t; ++l) post(i, l) = row[static_cast<std::size_t>(l)].get<double>();
  }
  return post;
}

void add_eval(CLI::App& app, EvalArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sc = app.add_subcommand("eval", "Score a predictions file against gold labels");
  sc->add_option("--predictions", a.predictions, "predictions.json from predict or baseline")->required();
  sc->add_option("--data", a.data, "Manifest with gold labels")->required();
  sc->add_option("--out", a.out, "Output directory (eval.json)");
  sc->callback([&] {
    action = [&] {
      if (!fs::exists(a.predictions)) throw IoError("no such file: " + a.predictions);
      const Json pred = eval::read_json(a.predictions);
      const auto ds = load_dataset(a.data);
      const std::string hash = hex64(eval::dataset_hash(ds));
      if (pred.value("dataset_hash", std::string()) != hash) {
        throw data::DataError(data::DataErrorKind::DimensionMismatch, "predictions were made on a different dataset");
      }
      if (!ds.gold) throw data::DataError(data::DataErrorKind::Format, "dataset has no gold labels");
      const auto labels = read_labels(pred);
      if (static_cast<Index>(labels.size()) != ds.size()) throw IoError("prediction count differs from the dataset");

      Json j = eval::report_header("eval", pred.value("seed", std::uint64_t{0}));
      j["config_hash"] = pred.value("config_hash", std::string());
      j["dataset_hash"] = hash;
      j["source"] = pred.value("kind", std::string());
      if (pred.contains("variant")) j["variant"] = pred["variant"];
      if (pred.contains("method")) j["method"] = pred["method"];
      if (pred["predictions"].contains("scheme")) j["scheme"] = pred["predictions"]["scheme"];
      j["metrics"] = eval::classification_json(labels, *ds.gold, ds.num_classes());
      out << eval::classification_table(j["metrics"]);
      if (pred["predictions"].contains("posteriors")) {
        const auto stats = eval::lf_prediction_stats(
            read_posteriors(pred["predictions"]["posteriors"], ds.size(), ds.num_lfs()), ds.matches);
        j["lf_stats"] = eval::lf_stats_json(stats, ds.lf_names);
        out << eval::lf_stats_table(stats, ds.lf_names);
      }
      const fs::path dir = output_dir(a.out);
      eval::write_json(dir / "eval.json", j);
      print_json_summary(out, dir / "eval.json");
    };
  });
}

// ---------------------------------------------------------------- baseline

struct BaselineArgs {
  std::string method = "mv";
  std::string train;
  std::string test;
  std::string out;
  std::uint64_t seed = 0;
  baselines::MlpTrainConfig mlp;
};

void add_baseline(CLI::App& app, BaselineArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sc = app.add_subcommand("baseline", "Majority vote (mv) or an MLP on majority-vote labels (mv-mlp)");
  sc->add_option("--method", a.method, "mv | mv-mlp")->capture_default_str();
  sc->add_option("--train", a.train, "Training manifest")->required();
  sc->add_option("--test", a.test, "Manifest to label (default: the training manifest)");
  sc->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  sc->add_option("--epochs", a.mlp.epochs, "MLP epochs")->capture_default_str();
  sc->add_option("--lr", a.mlp.learning_rate, "MLP learning rate")->capture_default_str();
  sc->add_option("--wd", a.mlp.weight_decay, "MLP weight decay")->capture_default_str();
  sc->add_option("--out", a.out, "Output directory (predictions.json)");
  sc->callback([&] {
    action = [&] {
      if (a.method != "mv" && a.method != "mv-mlp") throw ConfigError("unknown baseline '" + a.method + "'");
      const auto train = load_dataset(a.train);
      const auto test = a.test.empty() ? train : load_dataset(a.test);
      if (test.feature_dim() != train.feature_dim() || test.num_lfs() != train.num_lfs()) {
        throw data::DataError(data::DataErrorKind::DimensionMismatch, "train and test shapes differ");
      }
      std::vector<Index> labels;
      if (a.method == "mv") {
        labels = baselines::majority_vote(test, a.seed);
      } else {
        labels = baselines::train_mv_mlp(train, a.mlp, a.seed).predict(test.features);
      }
      Json j = eval::report_header("baseline", a.seed);
      Fnv1a cfg_hash;
      cfg_hash.text(a.method);
      if (a.method == "mv-mlp") {
        cfg_hash.value(a.mlp.epochs);
        cfg_hash.value(a.mlp.learning_rate);
        cfg_hash.value(a.mlp.weight_decay);
      }
      j["config_hash"] = hex64(cfg_hash.digest());
      j["dataset_hash"] = hex64(eval::dataset_hash(test));
      j["method"] = a.method;
      j["rows"] = test.size();
      j["classes"] = test.class_names;
      j["predictions"] = eval::labels_json(labels);
      if (test.gold) {
        j["metrics"] = eval::classification_json(labels, *test.gold, test.num_classes());
        out << eval::classification_table(j["metrics"]);
      }
      const fs::path dir = output_dir(a.out);
      eval::write_json(dir / "predictions.json", j);
      print_json_summary(out, dir / "predictions.json");
    };
  });
}

// ---------------------------------------------------------------- grid

struct GridArgs {
  std::string train;
  std::string dev;
  std::string scheme;
  std::string out;
  std::vector<std::string> axes;
  Index limit = 0;
  ConfigArgs cfg;
};

std::map<std::string, std::vector<std::string>> default_axes(weak::Variant v) {
  std::map<std::string, std::vector<std::string>> axes{
      {"learning_rate", {"1e-05", "0.0001"}},
      {"weight_decay", {"0.01", "0.001"}},
      {"epochs", {"30", "50", "100", "300", "450"}},
      {"depth", {"6", "8"}},
      {"embedding_multiplier", {"10", "15", "20"}},
  };
  if (v == weak::Variant::Negative) axes["negatives_per_positive"] = {"2", "3"};
  return axes;
}

void add_grid(CLI::App& app, GridArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sc = app.add_subcommand("grid", "Grid search over the hyperparameter grid, ranked by dev accuracy");
  sc->add_option("--train", a.train, "Training manifest")->required();
  sc->add_option("--dev", a.dev, "Development manifest with gold labels")->required();
  sc->add_option("--scheme", a.scheme, "Aggregation scheme (default: max, noisyor for N)");
  sc->add_option("--axis", a.axes, "Replace an axis: key=v1,v2,... (repeatable)");
  sc->add_option("--limit", a.limit, "Evaluate only the first N configurations (0: all)");
  sc->add_option("--out", a.out, "Output directory (leaderboard.json, leaderboard.tsv, best.config)");
  a.cfg.add(sc);
  sc->callback([&] {
    action = [&] {
      const auto base = a.cfg.resolve();
      const auto scheme = a.scheme.empty() ? default_scheme(base.variant) : aggregate::parse_scheme(a.scheme);
      aggregate::require_compatible(base.variant, scheme);
      auto axes = default_axes(base.variant);
      for (const auto& spec : a.axes) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key=v1,v2,..., got '" + spec + "'");
        std::vector<std::string> values;
        std::stringstream ss(spec.substr(eq + 1));
        for (std::string v; std::getline(ss, v, ',');) values.push_back(v);
        if (values.empty()) throw ConfigError("axis '" + spec.substr(0, eq) + "' has no values");
        axes[spec.substr(0, eq)] = values;
      }
      const auto train = load_dataset(a.train);
      const auto dev = load_dataset(a.dev);
      if (!dev.gold) throw data::DataError(data::DataErrorKind::Format, "dev set has no gold labels");

      std::vector<std::pair<std::string, std::vector<std::string>>> ordered(axes.begin(), axes.end());
      std::size_t total = 1;
      for (const auto& [k, v] : ordered) total *= v.size();
      if (a.limit > 0) total = std::min(total, static_cast<std::size_t>(a.limit));

      struct Entry {
        std::size_t index;
        weak::TrainConfig cfg;
        bool diverged = false;
        double accuracy = 0.0;
        double macro_f1 = 0.0;
      };
      std::vector<Entry> entries;
      for (std::size_t idx = 0; idx < total; ++idx) {
        Entry e{idx, base};
        std::size_t rest = idx;
        for (auto it = ordered.rbegin(); it != ordered.rend(); ++it) {
          weak::set_config_value(e.cfg, it->first, it->second[rest % it->second.size()]);
          rest /= it->second.size();
        }
        e.cfg.validate(train.num_lfs());
        try {
          const auto model = weak::train(train, e.cfg).model;
          const auto p = aggregate::predict(model, dev.features, scheme);
          const auto m = eval::classification_json(p.labels, *dev.gold, dev.num_classes());
          e.accuracy = m["accuracy"].get<double>();
          e.macro_f1 = m["macro_f1"].get<double>();
        } catch (const DivergenceError&) {
          e.diverged = true;
        }
        out << "config " << idx + 1 << "/" << total << (e.diverged ? " diverged" : "") << '\n';
        entries.push_back(std::move(e));
      }
      std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        if (x.diverged != y.diverged) return !x.diverged;
        return x.accuracy > y.accuracy;
      });

      Json board = eval::report_header("grid", base.seed);
      board["dataset_hash"] = hex64(eval::dataset_hash(train));
      board["dev_hash"] = hex64(eval::dataset_hash(dev));
      board["scheme"] = std::string(aggregate::scheme_name(scheme));
      Json rows = Json::array();
      std::ostringstream tsv;
      tsv << "rank\tindex\tconfig_hash\taccuracy\tmacro_f1";
      for (const auto& [k, v] : ordered) tsv << '\t' << k;
      tsv << '\n';
      for (std::size_t r = 0; r < entries.size(); ++r) {
        const auto& e = entries[r];
        Json row;
        row["rank"] = r + 1;
        row["index"] = e.index;
        row["config_hash"] = hex64(weak::config_hash(e.cfg));
        row["diverged"] = e.diverged;
        row["accuracy"] = e.accuracy;
        row["macro_f1"] = e.macro_f1;
        row["config"] = config_json(e.cfg);
        tsv << r + 1 << '\t' << e.index << '\t' << hex64(weak::config_hash(e.cfg)) << '\t'
            << (e.diverged ? "diverged" : Json(e.accuracy).dump()) << '\t'
            << (e.diverged ? "diverged" : Json(e.macro_f1).dump());
        const Json cj = config_json(e.cfg);
        for (const auto& [k, v] : ordered) tsv << '\t' << cj.value(k, std::string());
        tsv << '\n';
        rows.push_back(std::move(row));
      }
      board["leaderboard"] = std::move(rows);
      const fs::path dir = output_dir(a.out);
      eval::write_json(dir / "leaderboard.json", board);
      {
        std::ofstream f(dir / "leaderboard.tsv", std::ios::binary);
        if (!(f << tsv.str())) throw IoError("cannot write leaderboard.tsv");
      }
      if (!entries.empty()) {
        std::ofstream f(dir / "best.config", std::ios::binary);
        if (!(f << weak::to_text(entries.front().cfg))) throw IoError("cannot write best.config");
      }
      print_json_summary(out, dir / "leaderboard.json");
    };
  });
}

// ---------------------------------------------------------------- inspect

struct InspectArgs {
  std::string model;
  std::string data;
  std::string scheme;
  std::string out;
  Index k = 10;
};

void add_inspect(CLI::App& app, InspectArgs& a, std::function<void()>& action, std::ostream& out) {
  auto* sc = app.add_subcommand("inspect", "Top-k density examples per LF, LF correlations and coverage");
  sc->add_option("--model", a.model, "Checkpoint from train")->required();
  sc->add_option("--data", a.data, "Manifest to inspect")->required();
  sc->add_option("--k", a.k, "Examples per LF and direction")->capture_default_str();
  sc->add_option("--scheme", a.scheme, "Scheme for the attached predicted labels");
  sc->add_option("--out", a.out, "Output directory (inspect.json)");
  sc->callback([&] {
    action = [&] {
      const auto loaded = load_model(a.model);
      const auto& model = loaded.model;
      const auto scheme = a.scheme.empty() ? default_scheme(model.variant) : aggregate::parse_scheme(a.scheme);
      aggregate::require_compatible(model.variant, scheme);
      const auto ds = load_dataset(a.data);
      if (ds.feature_dim() != model.feature_dim || ds.num_lfs() != model.num_lfs()) {
        throw data::DataError(data::DataErrorKind::DimensionMismatch, "dataset does not fit the model's shape");
      }
      const auto rankings = eval::topk_density_examples(model, ds, a.k, scheme);
      const auto pearson = data::lf_pearson(ds.matches);
      const auto cov = data::coverage(ds.matches);

      Json j = eval::report_header("inspect", loaded.config.seed);
      j["config_hash"] = hex64(weak::config_hash(loaded.config));
      j["dataset_hash"] = hex64(eval::dataset_hash(ds));
      j["k"] = a.k;
      j["scheme"] = std::string(aggregate::scheme_name(scheme));
      j["topk"] = eval::rankings_json(rankings, ds.lf_names);
      Json corr = Json::array();
      for (Index r = 0; r < pearson.correlation.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < pearson.correlation.cols(); ++c) row.push_back(eval::number(pearson.correlation(r, c)));
        corr.push_back(std::move(row));
      }
      j["lf_pearson"] = {{"lf_names", ds.lf_names},
                         {"correlation", std::move(corr)},
                         {"constant", std::vector<bool>(pearson.constant.begin(), pearson.constant.end())}};
      j["coverage"] = {{"total_matches", cov.total_matches},
                       {"matches_per_sample", cov.matches_per_sample},
                       {"covered_fraction", cov.covered_fraction}};
      const fs::path dir = output_dir(a.out);
      eval::write_json(dir / "inspect.json", j);
      print_json_summary(out, dir / "inspect.json");
    };
  });
}

int report(std::ostream& err, int code, const std::string& what) {
  err << "error: " << what << '\n';
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weakly supervised classification with normalizing flows", "wsnf"};
  app.require_subcommand(1);
  app.footer(kExitCodes);

  std::function<void()> action;
  SynthArgs synth;
  PrepArgs prep;
  TrainArgs train;
  PredictArgs predict;
  EvalArgs evaluate;
  BaselineArgs baseline;
  GridArgs grid;
  InspectArgs inspect;
  add_synth(app, synth, action, out);
  add_prep(app, prep, action, out);
  add_train(app, train, action, out);
  add_predict(app, predict, action, out);
  add_eval(app, evaluate, action, out);
  add_baseline(app, baseline, action, out);
  add_grid(app, grid, action, out);
  add_inspect(app, inspect, action, out);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (action) action();
    return kOk;
  } catch (const CompatibilityError& e) {
    return report(err, kIncompatible, e.what());
  } catch (const IoError& e) {
    return report(err, kIo, e.what());
  } catch (const data::DataError& e) {
    return report(err, kData, e.what());
  } catch (const ConfigError& e) {
    return report(err, kConfig, e.what());
  } catch (const DivergenceError& e) {
    return report(err, kDiverged, e.what());
  } catch (const std::exception& e) {
    return report(err, kFailure, e.what());
  }
}

}  // namespace wsnf::cli
