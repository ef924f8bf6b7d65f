#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "divclust/common.hpp"

namespace divclust {

/// V feature matrices (d_v x N, columns are instances) plus the V x N
/// presence mask. Entries of unobserved columns are placeholders; every
/// computation in the library reads them only through the mask.
class MultiViewDataset {
 public:
  MultiViewDataset() = default;

  /// Validates shapes and the mask rule (each instance observed in at least
  /// one view). Throws ShapeError or InvariantError.
  MultiViewDataset(std::vector<Matrix> views, PresenceMask mask);

  /// Fully observed dataset.
  explicit MultiViewDataset(std::vector<Matrix> views);

  Index view_count() const noexcept { return static_cast<Index>(views_.size()); }
  Index instance_count() const noexcept { return mask_.cols(); }
  Index view_dim(Index v) const { return views_.at(static_cast<std::size_t>(v)).rows(); }
  std::vector<Index> view_dims() const;
  double average_view_dim() const;

  const std::vector<Matrix>& views() const noexcept { return views_; }
  const Matrix& view(Index v) const { return views_.at(static_cast<std::size_t>(v)); }
  const PresenceMask& mask() const noexcept { return mask_; }

  bool observed(Index v, Index n) const { return mask_(v, n) != 0; }
  Index observed_count(Index v) const;

 private:
  std::vector<Matrix> views_;
  PresenceMask mask_;
};

/// Fraction of unobserved (view, instance) cells: 1 - sum(mask) / (V * N).
double missing_rate(const PresenceMask& mask);

/// Randomly erases whole (view, instance) cells until the missing rate
/// reaches `target_rate` (to within one cell). Candidate instances are drawn
/// uniformly without replacement; each gets a uniformly random nonempty proper
/// subset of its observed views erased, capped by the remaining budget. If a
/// pass leaves budget over, single views are erased greedily in the same
/// instance order. Erased feature columns are zeroed.
///
/// Throws InfeasibleError when target_rate > 1 - 1/V or when the dataset is
/// already missing more cells than the target allows.
MultiViewDataset erase_views(const MultiViewDataset& dataset, double target_rate,
                             std::uint64_t seed);

/// Replaces every unobserved column of each view with the per-feature mean
/// over that view's observed columns. Observed columns are copied unchanged.
std::vector<Matrix> mean_fill(const MultiViewDataset& dataset);

/// Per-view, per-feature z-scoring computed over observed columns only.
/// Features with zero spread are centred but not scaled. Unobserved columns
/// are set to zero.
MultiViewDataset standardize(const MultiViewDataset& dataset);

/// Copy with unobserved columns reset to the zero placeholder.
MultiViewDataset zero_unobserved(const MultiViewDataset& dataset);

struct LoadOptions {
  bool standardize = true;
};

/// Optional ground-truth label vectors carried in meta.json, keyed by name.
using LabelSets = std::map<std::string, std::vector<int>>;

/// Reads a dataset directory: view_<v>.csv (d_v rows x N columns), mask.csv
/// (V x N of 0/1) and meta.json (V, N, view_dims, optional labels).
MultiViewDataset load_dataset(const std::filesystem::path& dir, const LoadOptions& options = {});

/// Label vectors stored under "labels" in meta.json; empty when absent.
LabelSets load_labels(const std::filesystem::path& dir);

/// Writes the directory format read by load_dataset.
void save_dataset(const std::filesystem::path& dir, const MultiViewDataset& dataset,
                  const LabelSets& labels = {});

}  // namespace divclust
