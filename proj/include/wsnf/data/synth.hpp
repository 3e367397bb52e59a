#ifndef WSNF_DATA_SYNTH_HPP
#define WSNF_DATA_SYNTH_HPP

#include "wsnf/data/dataset.hpp"

#include <cstdint>

namespace wsnf::data {

/// Gaussian-blob benchmark. Each class owns `lfs_per_class` sub-blobs placed
/// on a ring of radius `lf_radius` around the class center, and each LF
/// belongs to one sub-blob. A row is drawn from a random sub-blob; with
/// probability `coverage` it matches that sub-blob's LF, which with
/// probability `noise` is swapped for a random LF of another class. A
/// correctly matched row additionally matches the neighbouring LF of the same
/// class with probability `overlap`.
struct SynthSpec {
  Index classes = 2;
  Index lfs_per_class = 3;
  Index dim = 2;
  Index n_train = 2000;
  Index n_test = 500;
  double coverage = 0.6;
  double noise = 0.05;
  double overlap = 0.0;
  double class_radius = 4.0;
  double lf_radius = 1.2;
  double blob_std = 0.5;
  std::uint64_t seed = 0;
};

struct SynthData {
  WeakDataset train;
  WeakDataset test;
};

SynthData synth_generate(const SynthSpec& spec);

}  // namespace wsnf::data

#endif  // WSNF_DATA_SYNTH_HPP
