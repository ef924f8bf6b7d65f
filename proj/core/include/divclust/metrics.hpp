#pragma once

#include <optional>
#include <string>
#include <vector>

#include "divclust/clustering.hpp"
#include "divclust/common.hpp"
#include "divclust/hsic.hpp"

namespace divclust {

// All distances are Euclidean; points are matrix columns.

/// Mean silhouette width. Points in singleton clusters contribute 0.
/// Throws DegenerateError when fewer than two clusters are nonempty.
double silhouette(const Matrix& points, const Labeling& labeling);

/// Smallest single-linkage distance between clusters divided by the largest
/// cluster diameter. Throws DegenerateError with fewer than two nonempty
/// clusters or a zero largest diameter.
double dunn_index(const Matrix& points, const Labeling& labeling);

/// I(a; b) / sqrt(H(a) H(b)) with natural-log entropies; 0 when either
/// entropy is 0. Throws ShapeError on length mismatch.
double nmi(const Labeling& a, const Labeling& b);

/// Pair-counting Jaccard coefficient: n11 / (n11 + n10 + n01) over unordered
/// instance pairs. Defined as 1 when neither labeling co-clusters any pair.
double jaccard(const Labeling& a, const Labeling& b);

struct MetricsReport {
  std::vector<double> silhouette;  // per clustering
  std::vector<double> dunn;        // per clustering
  Matrix nmi;                      // M x M, unit diagonal
  Matrix jaccard;                  // M x M, unit diagonal
  double mean_silhouette = 0.0;
  double mean_dunn = 0.0;
  // Means over unordered pairs; absent when M == 1.
  std::optional<double> mean_nmi;
  std::optional<double> mean_jaccard;
  // Space in which silhouette and Dunn were measured.
  std::string evaluation_space = "subspace";

  std::optional<double> mean_diversity() const {
    if (!mean_nmi) return std::nullopt;
    return 1.0 - *mean_nmi;
  }
};

/// Quality of clustering m measured in subspace m; diversity over all pairs.
/// Throws ShapeError if the counts differ.
MetricsReport evaluate(const SubspaceSet& s, const std::vector<Labeling>& clusterings);

/// JSON text for a report (field names as in MetricsReport).
std::string to_json(const MetricsReport& report, int indent = 2);

}  // namespace divclust
