#include "wsnf/weak/model.hpp"

#include "wsnf/aggregate/aggregate.hpp"
#include "wsnf/weak/model_inputs.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace wsnf::weak {

namespace {

constexpr Index kChunkRows = 4096;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::string join_csv(const std::vector<T>& items) {
  std::ostringstream out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out << ',';
    if constexpr (std::is_floating_point_v<T>) {
      out << fmt_double(items[i]);
    } else {
      out << items[i];
    }
  }
  return out.str();
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

const std::string& meta_value(const ad::Checkpoint& ckpt, const std::string& key) {
  auto it = ckpt.meta.find(key);
  if (it == ckpt.meta.end()) throw IoError("checkpoint: missing metadata '" + key + "'");
  return it->second;
}

Index meta_index(const ad::Checkpoint& ckpt, const std::string& key) {
  try {
    return static_cast<Index>(std::stoll(meta_value(ckpt, key)));
  } catch (const std::logic_error&) {
    throw IoError("checkpoint: bad integer metadata '" + key + "'");
  }
}

MatrixXd random_table(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  MatrixXd m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

template <typename Fn>
VectorXd chunked(Index n, Fn&& fn) {
  VectorXd out(n);
  for (Index start = 0; start < n; start += kChunkRows) {
    const Index len = std::min(kChunkRows, n - start);
    out.segment(start, len) = fn(start, len);
  }
  return out;
}

}  // namespace

WeakModel init_model(const data::WeakDataset& ds, const TrainConfig& cfg) {
  cfg.validate(ds.num_lfs());
  if (ds.num_lfs() < 1) throw ConfigError("dataset has no labeling functions");
  WeakModel m;
  m.variant = cfg.variant;
  m.feature_dim = ds.feature_dim();
  m.embedding_dim = cfg.resolved_embedding_dim(ds.num_classes());
  m.lf_to_class = ds.lf_to_class;
  m.num_classes = ds.num_classes();
  m.flow = flow::RealNvp<double>({m.dim(), cfg.depth, cfg.hidden, cfg.leaky_slope}, "flow");

  Rng flow_rng(derive_seed(cfg.seed, "flow-init"));
  m.flow.init(m.params, flow_rng);
  m.params.add(kPositiveTable, random_table(ds.num_lfs(), m.embedding_dim, derive_seed(cfg.seed, "emb-pos")));
  if (cfg.variant == Variant::Negative) {
    m.params.add(kNegativeTable, random_table(ds.num_lfs(), m.embedding_dim, derive_seed(cfg.seed, "emb-neg")));
  }
  if (ds.size() > 0) m.lf_priors = aggregate::estimate_lf_priors(ds.matches).p;
  return m;
}

ad::Checkpoint to_checkpoint(const WeakModel& model, const TrainConfig& cfg) {
  ad::Checkpoint ckpt;
  ckpt.params = model.params;
  ckpt.params.clear_grads();
  auto& meta = ckpt.meta;
  meta["variant"] = std::string(1, variant_tag(model.variant));
  meta["feature_dim"] = std::to_string(model.feature_dim);
  meta["embedding_dim"] = std::to_string(model.embedding_dim);
  meta["num_classes"] = std::to_string(model.num_classes);
  meta["lf_to_class"] = join_csv(model.lf_to_class);
  meta["lf_priors"] = join_csv(model.lf_priors);
  const auto& shape = model.flow.shape();
  meta["flow.dim"] = std::to_string(shape.dim);
  meta["flow.depth"] = std::to_string(shape.depth);
  meta["flow.hidden"] = join_csv(shape.hidden);
  meta["flow.slope"] = fmt_double(shape.slope);
  meta["flow.mask"] = "alternating-parity";
  std::istringstream cfg_text(to_text(cfg));
  std::string line;
  std::getline(cfg_text, line);  // header
  while (std::getline(cfg_text, line)) {
    const auto eq = line.find(" = ");
    meta["config." + line.substr(0, eq)] = line.substr(eq + 3);
  }
  return ckpt;
}

LoadedModel from_checkpoint(const ad::Checkpoint& ckpt) {
  LoadedModel out;
  for (const auto& [key, value] : ckpt.meta) {
    if (key.rfind("config.", 0) == 0) set_config_value(out.config, key.substr(7), value);
  }
  WeakModel& m = out.model;
  m.variant = parse_variant(meta_value(ckpt, "variant"));
  m.feature_dim = meta_index(ckpt, "feature_dim");
  m.embedding_dim = meta_index(ckpt, "embedding_dim");
  m.num_classes = meta_index(ckpt, "num_classes");
  for (const auto& s : split_csv(meta_value(ckpt, "lf_to_class"))) m.lf_to_class.push_back(std::stoll(s));
  for (const auto& s : split_csv(meta_value(ckpt, "lf_priors"))) m.lf_priors.push_back(std::strtod(s.c_str(), nullptr));
  if (meta_value(ckpt, "flow.mask") != "alternating-parity") throw IoError("checkpoint: unsupported mask scheme");
  flow::FlowShape shape;
  shape.dim = meta_index(ckpt, "flow.dim");
  shape.depth = static_cast<int>(meta_index(ckpt, "flow.depth"));
  shape.hidden.clear();
  for (const auto& s : split_csv(meta_value(ckpt, "flow.hidden"))) shape.hidden.push_back(std::stoll(s));
  shape.slope = std::strtod(meta_value(ckpt, "flow.slope").c_str(), nullptr);
  if (shape.dim != m.dim()) throw IoError("checkpoint: flow dimension disagrees with feature + embedding size");
  m.flow = flow::RealNvp<double>(shape, "flow");
  m.params = ckpt.params;
  if (!m.params.contains(kPositiveTable) || m.positive().rows() != m.num_lfs() ||
      m.positive().cols() != m.embedding_dim) {
    throw IoError("checkpoint: embedding table missing or mis-shaped");
  }
  out.config.variant = m.variant;
  return out;
}

MatrixXd join_embedding(const MatrixXd& x, const RowVectorXd& embedding) {
  MatrixXd out(x.rows(), x.cols() + embedding.size());
  out.leftCols(x.cols()) = x;
  out.rightCols(embedding.size()) = embedding.replicate(x.rows(), 1);
  return out;
}

namespace {

MatrixXd table_log_density(const WeakModel& model, const MatrixXd& x, const MatrixXd& table) {
  if (x.cols() != model.feature_dim) throw ShapeError("feature width differs from the model's");
  MatrixXd out(x.rows(), table.rows());
  for (Index j = 0; j < table.rows(); ++j) {
    const RowVectorXd e = table.row(j);
    out.col(j) = chunked(x.rows(), [&](Index start, Index len) -> VectorXd {
      return model.flow.log_prob(model.params, join_embedding(x.middleRows(start, len), e));
    });
  }
  return out;
}

}  // namespace

double log_density(const WeakModel& model, const RowVectorXd& x, Index lf) {
  if (lf < 0 || lf >= model.num_lfs()) throw ShapeError("labeling function index out of range");
  const MatrixXd row = x;
  return model.flow.log_prob(model.params, join_embedding(row, model.positive().row(lf)))(0);
}

MatrixXd log_density_matrix(const WeakModel& model, const MatrixXd& x) {
  return table_log_density(model, x, model.positive());
}

MatrixXd negative_log_density_matrix(const WeakModel& model, const MatrixXd& x) {
  if (!model.has_negative()) throw Error("model has no negative embedding table");
  return table_log_density(model, x, model.negative());
}

double log_density_mixed(const WeakModel& model, const RowVectorXd& x, std::span<const double> alpha) {
  MatrixXd a(1, static_cast<Index>(alpha.size()));
  for (std::size_t j = 0; j < alpha.size(); ++j) a(0, static_cast<Index>(j)) = alpha[j];
  return log_density_mixed(model, MatrixXd(x), a)(0);
}

VectorXd log_density_mixed(const WeakModel& model, const MatrixXd& x, const MatrixXd& alphas) {
  return -pair_nll_mixed(model, x, alphas);
}

Index predict_standard(const WeakModel& model, const RowVectorXd& x) {
  const MatrixXd logp = log_density_matrix(model, MatrixXd(x));
  return aggregate::predict_max(logp.row(0), model.lf_to_class, model.num_classes).chosen;
}

VectorXd pair_nll_standard(const WeakModel& model, const MatrixXd& x, std::span<const Index> lfs) {
  if (static_cast<Index>(lfs.size()) != x.rows()) throw ShapeError("one LF index per row expected");
  return chunked(x.rows(), [&](Index start, Index len) -> VectorXd {
    ad::Tape<double> tape(model.params, ad::Tape<double>::no_grad);
    auto in = standard_inputs(tape, model, x.middleRows(start, len), lfs.subspan(static_cast<std::size_t>(start),
                                                                                 static_cast<std::size_t>(len)));
    return -model.flow.log_prob(tape, in).value().col(0);
  });
}

VectorXd pair_nll_mixed(const WeakModel& model, const MatrixXd& x, const MatrixXd& alphas) {
  if (alphas.rows() != x.rows()) throw ShapeError("one mixing vector per row expected");
  check_mixing_weights(alphas, model.num_lfs());
  return chunked(x.rows(), [&](Index start, Index len) -> VectorXd {
    ad::Tape<double> tape(model.params, ad::Tape<double>::no_grad);
    auto in = mixed_inputs(tape, model, x.middleRows(start, len), alphas.middleRows(start, len));
    return -model.flow.log_prob(tape, in).value().col(0);
  });
}

}  // namespace wsnf::weak
