#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "divclust/clustering.hpp"
#include "divclust/dataset.hpp"

namespace divclust {

struct DualStructureParams {
  Index instances = 200;
  int clusters_a = 3;
  int clusters_b = 2;
  std::vector<Index> view_dims{10, 12};
  double sigma = 0.05;
  std::uint64_t seed = 0;

  /// Throws ConfigError unless N >= 4 max(Ka, Kb), Ka, Kb >= 2 and every
  /// d_v >= Ka + Kb.
  void validate() const;
};

/// Fully observed dataset carrying two independently drawn partitions.
struct PlantedDataset {
  MultiViewDataset dataset;
  Labeling truth_a;
  Labeling truth_b;
  DualStructureParams params;
};

/// View v, column i: W_a^v onehot(a_i) + W_b^v onehot(b_i) + sigma * eps, with
/// standard normal mixing matrices [W_a^v W_b^v] of full column rank and
/// standard normal eps. Labels are uniform and independent; the draw is
/// repeated (on a derived stream) until every cluster of both partitions is
/// nonempty and nmi(truth_a, truth_b) <= 0.1. Deterministic per seed.
PlantedDataset make_dual_structure(const DualStructureParams& params);

/// Writes the dataset directory format with "truth_a" and "truth_b" labels.
void save_planted(const std::filesystem::path& dir, const PlantedDataset& planted);

}  // namespace divclust
