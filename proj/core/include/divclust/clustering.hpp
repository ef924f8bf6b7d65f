#pragma once

#include <cstdint>
#include <vector>

#include "divclust/common.hpp"
#include "divclust/hsic.hpp"

namespace divclust {

/// Cluster ids in [0, k) for N instances.
struct Labeling {
  std::vector<int> labels;
  int k = 0;

  Index size() const noexcept { return static_cast<Index>(labels.size()); }
  /// Throws InvariantError if any label falls outside [0, k) or N == 0.
  void validate() const;
  /// Number of clusters holding at least one instance.
  int nonempty_clusters() const;

  bool operator==(const Labeling&) const = default;
};

/// Within-cluster sum of squared Euclidean distances to cluster means.
double wcss(const Matrix& points, const Labeling& labeling);

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 300;
};

/// Lloyd iterations from k-means++ seeding, repeated `restarts` times; returns
/// the run with the smallest WCSS (earliest run on ties). Points are columns.
/// Empty clusters are repaired by moving in the point farthest from its
/// centroid. Nearest-centroid ties go to the lower index.
///
/// Throws InfeasibleError when k > N and ConfigError when k < 1 or restarts < 1.
Labeling kmeans(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& options = {});

/// k-means on each subspace (columns as points); subspace m uses the seed
/// derive_seed(seed, m).
std::vector<Labeling> generate_clusterings(const SubspaceSet& s, int k, std::uint64_t seed,
                                           const KMeansOptions& options = {});

}  // namespace divclust
