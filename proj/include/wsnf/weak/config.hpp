#ifndef WSNF_WEAK_CONFIG_HPP
#define WSNF_WEAK_CONFIG_HPP

#include "wsnf/core/types.hpp"
#include "wsnf/weak/variant.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wsnf::weak {

/// Training hyperparameters. Grid axes and their defaults:
///   learning_rate {1e-5, 1e-4}, weight_decay {1e-2, 1e-3},
///   epochs {30, 50, 100, 300, 450}, depth {6, 8},
///   embedding_multiplier {10, 15, 20} (h = multiplier * #classes),
///   negatives_per_positive {2, 3}.
struct TrainConfig {
  Variant variant = Variant::Standard;
  double learning_rate = 1e-4;
  double weight_decay = 1e-3;
  int epochs = 100;
  int depth = 6;
  int embedding_multiplier = 15;
  Index embedding_dim = 0;  // 0: embedding_multiplier * #classes
  std::vector<Index> hidden{128, 128};
  double leaky_slope = 0.01;
  int negatives_per_positive = 2;
  int iterations = 2;
  Index cooccurrence_threshold = 10;
  double simplex_floor = 0.01;
  Index batch_size = 64;
  std::uint64_t seed = 0;
  bool warm_start = false;

  Index resolved_embedding_dim(Index num_classes) const;

  /// Throws ConfigError. `num_lfs` enables the simplex floor check
  /// simplex_floor * t < 1.
  void validate(Index num_lfs = 0) const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

inline constexpr int kConfigVersion = 1;

/// Versioned key = value text, one key per line, first line
/// "wsnf-config 1".
std::string to_text(const TrainConfig& cfg);

/// Parses config text on top of `base`; keys not present keep base values.
TrainConfig parse_config(std::string_view text, TrainConfig base = {});

TrainConfig load_config(const std::filesystem::path& path, TrainConfig base = {});

/// Sets one key (same names as the text format). Throws ConfigError for
/// unknown keys or unparsable values.
void set_config_value(TrainConfig& cfg, std::string_view key, std::string_view value);

/// Stable 64-bit hash of to_text(cfg).
std::uint64_t config_hash(const TrainConfig& cfg);

}  // namespace wsnf::weak

#endif  // WSNF_WEAK_CONFIG_HPP
