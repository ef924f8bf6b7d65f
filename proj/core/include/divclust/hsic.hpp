#pragma once

#include <vector>

#include "divclust/common.hpp"

namespace divclust {

/// M shared representations, each dim x N; column i of subspace m is the
/// representation of instance i in that subspace.
struct SubspaceSet {
  std::vector<Matrix> subspaces;

  Index count() const noexcept { return static_cast<Index>(subspaces.size()); }
  Index dim() const noexcept { return subspaces.empty() ? 0 : subspaces.front().rows(); }
  Index instance_count() const noexcept { return subspaces.empty() ? 0 : subspaces.front().cols(); }

  Matrix& operator[](Index m) { return subspaces.at(static_cast<std::size_t>(m)); }
  const Matrix& operator[](Index m) const { return subspaces.at(static_cast<std::size_t>(m)); }

  /// Throws ShapeError on mixed shapes, InvariantError on non-finite entries.
  void validate() const;
};

/// Inner-product Gram matrix H^T H (N x N).
Matrix gram_inner(const Matrix& h);

/// A = I - 11^T / N. Throws DegenerateError for N < 2.
Matrix centering_matrix(Index n);

/// tr(K A K' A) / (N - 1)^2 with inner-product kernels K = H^T H, K' = H'^T H'.
///
/// Evaluated without forming N x N matrices: with Hc = H A the trace equals
/// ||Hc Hc'^T||_F^2. Throws ShapeError when the column counts differ and
/// DegenerateError for N < 2.
double hsic(const Matrix& h, const Matrix& h_other);

/// d hsic(H, H') / dH = 2 H A K' A / (N - 1)^2, computed as
/// 2 (Hc Hc'^T) Hc' / (N - 1)^2.
Matrix hsic_gradient(const Matrix& h, const Matrix& h_other);

/// Sum of hsic over unordered pairs m < m'.
double pairwise_hsic(const SubspaceSet& set);

}  // namespace divclust
