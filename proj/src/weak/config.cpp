#include "wsnf/weak/config.hpp"

#include "wsnf/core/error.hpp"
#include "wsnf/core/hash.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wsnf::weak {

char variant_tag(Variant v) {
  switch (v) {
    case Variant::Standard:
      return 'S';
    case Variant::Iterative:
      return 'I';
    case Variant::Negative:
      return 'N';
    case Variant::Mixed:
      return 'M';
  }
  return '?';
}

Variant parse_variant(std::string_view tag) {
  if (tag == "S") return Variant::Standard;
  if (tag == "I") return Variant::Iterative;
  if (tag == "N") return Variant::Negative;
  if (tag == "M") return Variant::Mixed;
  throw ConfigError("unknown variant '" + std::string(tag) + "' (expected S, I, N or M)");
}

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config: bad value '" + std::string(v) + "' for '" + std::string(key) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: bad boolean '" + std::string(v) + "' for '" + std::string(key) + "'");
}

}  // namespace

Index TrainConfig::resolved_embedding_dim(Index num_classes) const {
  return embedding_dim > 0 ? embedding_dim : static_cast<Index>(embedding_multiplier) * num_classes;
}

void TrainConfig::validate(Index num_lfs) const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be non-negative");
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (depth < 1) throw ConfigError("depth must be positive");
  if (embedding_multiplier < 1 && embedding_dim < 1) throw ConfigError("embedding size must be positive");
  if (embedding_dim < 0) throw ConfigError("embedding_dim must be non-negative");
  for (Index h : hidden) {
    if (h < 1) throw ConfigError("hidden widths must be positive");
  }
  if (!(leaky_slope >= 0.0)) throw ConfigError("leaky_slope must be non-negative");
  if (negatives_per_positive < 0) throw ConfigError("negatives_per_positive must be non-negative");
  if (iterations < 0) throw ConfigError("iterations must be non-negative");
  if (cooccurrence_threshold < 1) throw ConfigError("cooccurrence_threshold must be at least 1");
  if (!(simplex_floor >= 0.0)) throw ConfigError("simplex_floor must be non-negative");
  if (num_lfs > 0 && !(simplex_floor * static_cast<double>(num_lfs) < 1.0)) {
    throw ConfigError("simplex_floor * #LFs must be below 1");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
}

std::string to_text(const TrainConfig& c) {
  std::ostringstream out;
  out << "wsnf-config " << kConfigVersion << '\n';
  out << "variant = " << variant_tag(c.variant) << '\n';
  out << "learning_rate = " << fmt_double(c.learning_rate) << '\n';
  out << "weight_decay = " << fmt_double(c.weight_decay) << '\n';
  out << "epochs = " << c.epochs << '\n';
  out << "depth = " << c.depth << '\n';
  out << "embedding_multiplier = " << c.embedding_multiplier << '\n';
  out << "embedding_dim = " << c.embedding_dim << '\n';
  out << "hidden = ";
  for (std::size_t i = 0; i < c.hidden.size(); ++i) out << (i ? "," : "") << c.hidden[i];
  out << '\n';
  out << "leaky_slope = " << fmt_double(c.leaky_slope) << '\n';
  out << "negatives_per_positive = " << c.negatives_per_positive << '\n';
  out << "iterations = " << c.iterations << '\n';
  out << "cooccurrence_threshold = " << c.cooccurrence_threshold << '\n';
  out << "simplex_floor = " << fmt_double(c.simplex_floor) << '\n';
  out << "batch_size = " << c.batch_size << '\n';
  out << "seed = " << c.seed << '\n';
  out << "warm_start = " << (c.warm_start ? "true" : "false") << '\n';
  return out.str();
}

void set_config_value(TrainConfig& c, std::string_view key, std::string_view raw) {
  const std::string_view v = trim(raw);
  if (key == "variant") {
    c.variant = parse_variant(v);
  } else if (key == "learning_rate") {
    c.learning_rate = parse_number<double>(key, v);
  } else if (key == "weight_decay") {
    c.weight_decay = parse_number<double>(key, v);
  } else if (key == "epochs") {
    c.epochs = parse_number<int>(key, v);
  } else if (key == "depth") {
    c.depth = parse_number<int>(key, v);
  } else if (key == "embedding_multiplier") {
    c.embedding_multiplier = parse_number<int>(key, v);
  } else if (key == "embedding_dim") {
    c.embedding_dim = parse_number<Index>(key, v);
  } else if (key == "hidden") {
    c.hidden.clear();
    std::string_view rest = v;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      c.hidden.push_back(parse_number<Index>(key, trim(rest.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  } else if (key == "leaky_slope") {
    c.leaky_slope = parse_number<double>(key, v);
  } else if (key == "negatives_per_positive") {
    c.negatives_per_positive = parse_number<int>(key, v);
  } else if (key == "iterations") {
    c.iterations = parse_number<int>(key, v);
  } else if (key == "cooccurrence_threshold") {
    c.cooccurrence_threshold = parse_number<Index>(key, v);
  } else if (key == "simplex_floor") {
    c.simplex_floor = parse_number<double>(key, v);
  } else if (key == "batch_size") {
    c.batch_size = parse_number<Index>(key, v);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, v);
  } else if (key == "warm_start") {
    c.warm_start = parse_bool(key, v);
  } else {
    throw ConfigError("config: unknown key '" + std::string(key) + "'");
  }
}

TrainConfig parse_config(std::string_view text, TrainConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("config: empty text");
  {
    std::istringstream header(line);
    std::string magic;
    int version = 0;
    if (!(header >> magic >> version) || magic != "wsnf-config") throw ConfigError("config: bad header '" + line + "'");
    if (version != kConfigVersion) throw ConfigError("config: unsupported version " + std::to_string(version));
  }
  while (std::getline(in, line)) {
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError("config: expected key = value, got '" + line + "'");
    set_config_value(base, trim(s.substr(0, eq)), s.substr(eq + 1));
  }
  return base;
}

TrainConfig load_config(const std::filesystem::path& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::uint64_t config_hash(const TrainConfig& cfg) {
  Fnv1a h;
  h.text(to_text(cfg));
  return h.digest();
}

}  // namespace wsnf::weak
