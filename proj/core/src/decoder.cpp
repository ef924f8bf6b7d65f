#include "divclust/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace divclust {

void DecoderNet::validate() const {
  const Index in = w1.cols();
  const Index hidden = w1.rows();
  const Index out = w2.rows();
  if (b1.size() != hidden || w2.cols() != hidden || b2.size() != out) {
    throw ShapeError("decoder parameters disagree: w1 " + std::to_string(hidden) + "x" +
                     std::to_string(in) + ", b1 " + std::to_string(b1.size()) + ", w2 " +
                     std::to_string(out) + "x" + std::to_string(w2.cols()) + ", b2 " +
                     std::to_string(b2.size()));
  }
  if (!w1.allFinite() || !b1.allFinite() || !w2.allFinite() || !b2.allFinite()) {
    throw InvariantError("decoder parameters contain non-finite entries");
  }
}

DecoderNet DecoderNet::zeros(Index in_dim, Index hidden_dim, Index out_dim) {
  return {Matrix::Zero(hidden_dim, in_dim), Vector::Zero(hidden_dim),
          Matrix::Zero(out_dim, hidden_dim), Vector::Zero(out_dim)};
}

Index default_hidden_dim(Index in_dim, Index out_dim) {
  return std::max(in_dim, (out_dim + 1) / 2);
}

DecoderNet init_decoder(Index in_dim, Index hidden_dim, Index out_dim, std::mt19937_64& rng) {
  if (in_dim < 1 || hidden_dim < 1 || out_dim < 1) {
    throw ConfigError("decoder dimensions must be positive");
  }
  auto glorot = [&rng](Index rows, Index cols) {
    const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> u(-s, s);
    Matrix w(rows, cols);
    // Fill column-major explicitly so the draw order is fixed.
    for (Index c = 0; c < cols; ++c)
      for (Index r = 0; r < rows; ++r) w(r, c) = u(rng);
    return w;
  };
  DecoderNet net;
  net.w1 = glorot(hidden_dim, in_dim);
  net.b1 = Vector::Zero(hidden_dim);
  net.w2 = glorot(out_dim, hidden_dim);
  net.b2 = Vector::Zero(out_dim);
  return net;
}

namespace {

void check_input(const DecoderNet& net, const Matrix& h) {
  if (h.rows() != net.in_dim()) {
    throw ShapeError("decoder expects " + std::to_string(net.in_dim()) + "-row input, got " +
                     std::to_string(h.rows()));
  }
}

void check_target(const DecoderNet& net, const Matrix& h, const Matrix& x,
                  std::span<const std::uint8_t> colmask) {
  check_input(net, h);
  if (x.rows() != net.out_dim() || x.cols() != h.cols()) {
    throw ShapeError("decoder target is " + std::to_string(x.rows()) + "x" +
                     std::to_string(x.cols()) + ", expected " + std::to_string(net.out_dim()) +
                     "x" + std::to_string(h.cols()));
  }
  if (static_cast<Index>(colmask.size()) != h.cols()) {
    throw ShapeError("column mask has " + std::to_string(colmask.size()) + " entries for " +
                     std::to_string(h.cols()) + " columns");
  }
}

}  // namespace

Matrix forward(const DecoderNet& net, const Matrix& h) {
  check_input(net, h);
  Matrix hidden = (net.w1 * h).colwise() + net.b1;
  hidden = hidden.cwiseMax(0.0);
  Matrix out = net.w2 * hidden;
  out.colwise() += net.b2;
  return out;
}

double masked_squared_error(const DecoderNet& net, const Matrix& h, const Matrix& x,
                            std::span<const std::uint8_t> colmask, double scale) {
  check_target(net, h, x, colmask);
  const Matrix y = forward(net, h);
  double total = 0.0;
  for (Index i = 0; i < h.cols(); ++i)
    if (colmask[static_cast<std::size_t>(i)]) total += (x.col(i) - y.col(i)).squaredNorm();
  return scale * total;
}

DecoderGrad backward(const DecoderNet& net, const Matrix& h, const Matrix& x,
                     std::span<const std::uint8_t> colmask, double scale) {
  check_target(net, h, x, colmask);
  const Index batch = h.cols();

  Matrix pre = (net.w1 * h).colwise() + net.b1;
  const Matrix act = pre.cwiseMax(0.0);
  Matrix out = net.w2 * act;
  out.colwise() += net.b2;

  // dL/dout = 2 * scale * (out - x) on observed columns, zero elsewhere.
  Matrix d_out = Matrix::Zero(net.out_dim(), batch);
  for (Index i = 0; i < batch; ++i)
    if (colmask[static_cast<std::size_t>(i)]) d_out.col(i) = 2.0 * scale * (out.col(i) - x.col(i));

  DecoderGrad g;
  g.w2 = d_out * act.transpose();
  g.b2 = d_out.rowwise().sum();
  Matrix d_pre = net.w2.transpose() * d_out;
  // Rectifier derivative taken as 0 at the kink.
  d_pre = d_pre.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
  g.w1 = d_pre * h.transpose();
  g.b1 = d_pre.rowwise().sum();
  g.input = net.w1.transpose() * d_pre;
  return g;
}

}  // namespace divclust
