#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "regraph/rng.hpp"
#include "regraph/spatial_gcn.hpp"
#include "regraph/tensor.hpp"

namespace regraph {

// Fine (source vocabulary) to coarse (target vocabulary) label hierarchy:
// fine class c belongs to coarse class parent[c].
struct Hierarchy {
  std::size_t fine_count = 0;
  std::size_t coarse_count = 0;
  std::vector<std::size_t> parent;

  // Contiguous groups: parent(c) = c * coarse / fine.
  static Hierarchy contiguous(std::size_t fine, std::size_t coarse);
  // Throws ValidationError unless every coarse class has at least one fine class.
  void validate() const;
};

struct SyntheticScene {
  std::size_t id = 0;
  std::size_t scene_type = 0;
  std::vector<Box> boxes;        // proposal boxes
  Tensor2 box_targets;           // N_r x 4 regression targets (true - proposal)
  std::vector<int> fine_labels;
  std::vector<int> coarse_labels;
  Tensor2 features;              // N_r x D
};

struct DatasetConfig {
  std::uint64_t seed = 1;
  std::size_t scenes = 150;
  std::size_t proposals = 32;    // N_r
  std::size_t feature_dim = 32;  // D
  std::size_t fine_classes = 8;  // C_S
  std::size_t coarse_classes = 4;  // C_T
  double context_alpha = 1.0;
  double noise_sigma = 2.0;
};

struct SyntheticDataset {
  Hierarchy hierarchy;
  std::vector<SyntheticScene> train;
  std::vector<SyntheticScene> test;
};

// Scene-typed generative process: feature = prototype[fine] +
// alpha * context[scene_type] + sigma * noise, 80/20 train/test split on
// disjoint scenes. Scene type s draws fine labels from coarse group s with
// probability 0.6, uniformly otherwise, giving a uniform label marginal.
SyntheticDataset generate_dataset(const DatasetConfig& config);

void write_scenes(std::ostream& os, const std::vector<SyntheticScene>& scenes);
std::vector<SyntheticScene> read_scenes(std::istream& is);

}  // namespace regraph
