#ifndef WSNF_DATA_IO_HPP
#define WSNF_DATA_IO_HPP

#include "wsnf/data/dataset.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace wsnf::data {

inline constexpr int kManifestVersion = 1;

/// Text manifest describing one dataset split. Version 1 layout:
///
///     wsnf-manifest 1
///     split = train
///     n = 2000
///     d = 2
///     t = 6
///     classes = neg,pos
///     lf_names = lf0,lf1,...
///     lf_to_class = 0,0,0,1,1,1
///     features = train.features.f64     (n*d little-endian float64, row-major)
///     matches = train.matches.u8        (n*t bytes, each 0 or 1)
///     labels = train.labels.i32         (optional; n little-endian int32)
///     encoder = ...                     (optional provenance)
///     preprocessing = ...               (optional provenance)
///
/// Payload paths are relative to the manifest's directory. Unknown keys are
/// preserved in `extra`.
struct Manifest {
  std::string split = "train";
  Index n = 0;
  Index d = 0;
  Index t = 0;
  std::vector<std::string> classes;
  std::vector<std::string> lf_names;
  std::vector<Index> lf_to_class;
  std::string features_path;
  std::string matches_path;
  std::string labels_path;
  std::string encoder;
  std::string preprocessing;
  std::map<std::string, std::string> extra;
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& m);

/// Reads a manifest and its payloads, validating everything.
WeakDataset load(const std::filesystem::path& manifest_path);

struct Provenance {
  std::string encoder = "unknown";
  std::string preprocessing = "none";
};

/// Writes `<stem>.manifest` and its payloads into `dir`. Returns the
/// manifest path.
std::filesystem::path save(const WeakDataset& ds, const std::filesystem::path& dir, const std::string& stem,
                           const Provenance& provenance = {});

}  // namespace wsnf::data

#endif  // WSNF_DATA_IO_HPP
