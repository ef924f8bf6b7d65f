#pragma once

#include <random>
#include <vector>

#include "divclust/dataset.hpp"
#include "divclust/objective.hpp"
#include "support/oracles.hpp"

namespace fixture {

using namespace divclust;

struct Problem {
  MultiViewDataset data;
  DecoderGrid nets;
  SubspaceSet subspaces;
};

// Random decoders with nonzero biases, random subspaces and a random mask
// that keeps every instance observed somewhere. Missing columns hold zeros.
inline Problem random_problem(std::uint64_t seed, Index n, std::vector<Index> dims, Index m_count, Index d,
                              bool with_missing = true) {
  std::mt19937_64 rng(seed);
  const auto v_count = static_cast<Index>(dims.size());
  PresenceMask mask(v_count, n);
  mask.setOnes();
  if (with_missing) {
    for (Index i = 0; i < n; ++i) {
      const Index drop = static_cast<Index>(rng() % static_cast<std::uint64_t>(v_count + 1));
      if (drop < v_count && v_count > 1) mask(drop, i) = 0;
    }
  }
  std::vector<Matrix> views;
  for (Index v = 0; v < v_count; ++v) {
    Matrix x = oracle::random_matrix(dims[static_cast<std::size_t>(v)], n, rng);
    for (Index i = 0; i < n; ++i)
      if (!mask(v, i)) x.col(i).setZero();
    views.push_back(std::move(x));
  }
  std::vector<DecoderNet> nets;
  for (Index m = 0; m < m_count; ++m)
    for (Index v = 0; v < v_count; ++v) {
      auto net = init_decoder(d, default_hidden_dim(d, dims[static_cast<std::size_t>(v)]),
                              dims[static_cast<std::size_t>(v)], rng);
      net.b1 = oracle::random_matrix(net.hidden_dim(), 1, rng, 0.1);
      net.b2 = oracle::random_matrix(net.out_dim(), 1, rng, 0.1);
      nets.push_back(std::move(net));
    }
  SubspaceSet s;
  for (Index m = 0; m < m_count; ++m) s.subspaces.push_back(oracle::random_matrix(d, n, rng));
  return {MultiViewDataset(std::move(views), std::move(mask)), DecoderGrid(m_count, v_count, std::move(nets)),
          std::move(s)};
}

// Reference J1/J2 built from the scalar oracles.
inline double reference_loss(const Problem& p, double lambda, double alpha) {
  const Index n = p.data.instance_count();
  double d_sum = 0.0;
  for (Index v = 0; v < p.data.view_count(); ++v) d_sum += static_cast<double>(p.data.view_dim(v));
  const double d_ave = d_sum / static_cast<double>(p.data.view_count());
  const double phi = 1.0 / (static_cast<double>(n) * static_cast<double>(n) * d_ave * d_ave);
  double total = 0.0;
  for (Index m = 0; m < p.subspaces.count(); ++m)
    for (Index v = 0; v < p.data.view_count(); ++v) {
      std::vector<std::uint8_t> mask(static_cast<std::size_t>(n));
      for (Index i = 0; i < n; ++i) mask[static_cast<std::size_t>(i)] = p.data.mask()(v, i);
      total += oracle::masked_error(p.nets.at(m, v), p.subspaces[m], p.data.view(v), mask, phi);
    }
  for (Index a = 0; a < p.subspaces.count(); ++a)
    for (Index b = a + 1; b < p.subspaces.count(); ++b) total += lambda * oracle::hsic(p.subspaces[a], p.subspaces[b]);
  for (const Matrix& h : p.subspaces.subspaces) total += alpha * h.cwiseAbs().sum();
  return total;
}

}  // namespace fixture
