#include "divclust/hsic.hpp"

#include <algorithm>
#include <string>

namespace divclust {

void SubspaceSet::validate() const {
  for (std::size_t m = 0; m < subspaces.size(); ++m) {
    const Matrix& h = subspaces[m];
    if (h.rows() != dim() || h.cols() != instance_count()) {
      throw ShapeError("subspace " + std::to_string(m) + " is " + std::to_string(h.rows()) + "x" +
                       std::to_string(h.cols()) + ", expected " + std::to_string(dim()) + "x" +
                       std::to_string(instance_count()));
    }
    if (!h.allFinite()) throw InvariantError("subspace " + std::to_string(m) + " is not finite");
  }
}

Matrix gram_inner(const Matrix& h) { return h.transpose() * h; }

Matrix centering_matrix(Index n) {
  if (n < 2) throw DegenerateError("centering needs N >= 2, got " + std::to_string(n));
  Matrix a = Matrix::Constant(n, n, -1.0 / static_cast<double>(n));
  a.diagonal().array() += 1.0;
  return a;
}

namespace {

void check_pair(const Matrix& h, const Matrix& h_other) {
  if (h.cols() != h_other.cols()) {
    throw ShapeError("hsic operands have " + std::to_string(h.cols()) + " and " +
                     std::to_string(h_other.cols()) + " instances");
  }
  if (h.cols() < 2) throw DegenerateError("hsic needs N >= 2");
}

// Shifting by the first column first makes constant rows centre to exact zeros.
Matrix centered(const Matrix& h) {
  const Matrix shifted = h.colwise() - h.col(0);
  return shifted.colwise() - shifted.rowwise().mean();
}

// Fixed operand order so that hsic(a, b) and hsic(b, a) round identically.
bool goes_first(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) return a.rows() < b.rows();
  return !std::lexicographical_compare(b.data(), b.data() + b.size(), a.data(), a.data() + a.size());
}

}  // namespace

double hsic(const Matrix& h, const Matrix& h_other) {
  check_pair(h, h_other);
  const double denom = static_cast<double>(h.cols() - 1);
  const bool in_order = goes_first(h, h_other);
  const Matrix cross = centered(in_order ? h : h_other) * centered(in_order ? h_other : h).transpose();
  return cross.squaredNorm() / (denom * denom);
}

Matrix hsic_gradient(const Matrix& h, const Matrix& h_other) {
  check_pair(h, h_other);
  const double denom = static_cast<double>(h.cols() - 1);
  const Matrix hc_other = centered(h_other);
  const Matrix cross = centered(h) * hc_other.transpose();
  return (2.0 / (denom * denom)) * cross * hc_other;
}

double pairwise_hsic(const SubspaceSet& set) {
  double total = 0.0;
  for (Index m = 0; m < set.count(); ++m)
    for (Index k = m + 1; k < set.count(); ++k) total += hsic(set[m], set[k]);
  return total;
}

}  // namespace divclust
