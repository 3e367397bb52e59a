#ifndef WSNF_AUTODIFF_CHECKPOINT_HPP
#define WSNF_AUTODIFF_CHECKPOINT_HPP

#include "wsnf/autodiff/param_store.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace wsnf::ad {

/// Parameter dump plus free-form metadata.
///
/// Text format, version 1:
///
///     wsnf-checkpoint 1
///     meta <key> <value to end of line>
///     param <name> <rows> <cols>
///     <rows*cols IEEE-754 bit patterns as 16 hex digits, row-major>
///     end
///
/// Values are stored as raw bit patterns so a save/load cycle is bit-exact.
struct Checkpoint {
  std::map<std::string, std::string> meta;
  ParamStore<double> params;
};

inline constexpr int kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace wsnf::ad

#endif  // WSNF_AUTODIFF_CHECKPOINT_HPP
