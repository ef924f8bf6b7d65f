#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "divclust/common.hpp"

namespace divclust {

/// Two-layer decoder mapping a subspace column h (in_dim) to a view column
/// (out_dim): W2 * relu(W1 * h + b1) + b2.
struct DecoderNet {
  Matrix w1;  // hidden x in
  Vector b1;  // hidden
  Matrix w2;  // out x hidden
  Vector b2;  // out

  Index in_dim() const noexcept { return w1.cols(); }
  Index hidden_dim() const noexcept { return w1.rows(); }
  Index out_dim() const noexcept { return w2.rows(); }

  /// Throws ShapeError if the four tensors disagree, InvariantError if any
  /// entry is non-finite.
  void validate() const;

  static DecoderNet zeros(Index in_dim, Index hidden_dim, Index out_dim);
};

/// Same layout as DecoderNet, plus the gradient with respect to the input.
struct DecoderGrad {
  Matrix w1;
  Vector b1;
  Matrix w2;
  Vector b2;
  Matrix input;  // in x B
};

/// Hidden width used when none is configured: max(in_dim, ceil(out_dim / 2)).
Index default_hidden_dim(Index in_dim, Index out_dim);

/// Weights uniform on [-s, s] with s = sqrt(6 / (fan_in + fan_out)); biases zero.
DecoderNet init_decoder(Index in_dim, Index hidden_dim, Index out_dim, std::mt19937_64& rng);

/// Column-wise forward pass. Throws ShapeError if h.rows() != in_dim.
Matrix forward(const DecoderNet& net, const Matrix& h);

/// scale * sum over columns i with colmask[i] != 0 of ||x_i - forward(h_i)||^2.
/// Masked-out columns of x are never read.
double masked_squared_error(const DecoderNet& net, const Matrix& h, const Matrix& x,
                            std::span<const std::uint8_t> colmask, double scale);

/// Exact gradient of masked_squared_error with respect to every parameter and
/// to h. Columns with colmask[i] == 0 contribute nothing; their input
/// gradient is exactly zero.
DecoderGrad backward(const DecoderNet& net, const Matrix& h, const Matrix& x,
                     std::span<const std::uint8_t> colmask, double scale);

}  // namespace divclust
