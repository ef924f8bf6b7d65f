#include "divclust/objective.hpp"

#include <cmath>
#include <span>
#include <string>

namespace divclust {

void TrainConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and >= 0");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be finite and >= 0");
  if (subspaces < 1) throw ConfigError("subspace count must be >= 1");
  if (dim < 1) throw ConfigError("subspace dimension must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning rate must be finite and >= 0");
  if (max_epochs < 0) throw ConfigError("max_epochs must be >= 0");
  if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
  if (hidden_dim && *hidden_dim < 1) throw ConfigError("hidden width must be >= 1");
  if (clusters < 2) throw ConfigError("cluster count must be >= 2");
  if (kmeans_restarts < 1) throw ConfigError("k-means restarts must be >= 1");
  if (inner_steps < 1) throw ConfigError("inner steps must be >= 1");
  if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) throw ConfigError("init scale must be finite and >= 0");
}

DecoderGrid::DecoderGrid(Index subspaces, Index views, std::vector<DecoderNet> nets)
    : subspaces_(subspaces), views_(views), nets_(std::move(nets)) {
  if (static_cast<Index>(nets_.size()) != subspaces_ * views_) {
    throw ShapeError("decoder grid expects " + std::to_string(subspaces_ * views_) +
                     " nets, got " + std::to_string(nets_.size()));
  }
}

namespace {

void check_model(const DecoderGrid& nets, const SubspaceSet& s, const MultiViewDataset& data) {
  if (nets.subspaces() != s.count() || nets.views() != data.view_count()) {
    throw ShapeError("decoder grid is " + std::to_string(nets.subspaces()) + "x" +
                     std::to_string(nets.views()) + " but there are " + std::to_string(s.count()) +
                     " subspaces and " + std::to_string(data.view_count()) + " views");
  }
  if (s.instance_count() != data.instance_count()) {
    throw ShapeError("subspaces have " + std::to_string(s.instance_count()) +
                     " columns, dataset has " + std::to_string(data.instance_count()) + " instances");
  }
  for (Index m = 0; m < s.count(); ++m) {
    if (s[m].rows() != s.dim() || s[m].cols() != s.instance_count())
      throw ShapeError("subspace " + std::to_string(m) + " has a different shape");
    for (Index v = 0; v < data.view_count(); ++v) {
      const DecoderNet& net = nets.at(m, v);
      if (net.in_dim() != s.dim() || net.out_dim() != data.view_dim(v)) {
        throw ShapeError("decoder (" + std::to_string(m) + ", " + std::to_string(v) + ") maps " +
                         std::to_string(net.in_dim()) + " -> " + std::to_string(net.out_dim()) +
                         ", expected " + std::to_string(s.dim()) + " -> " +
                         std::to_string(data.view_dim(v)));
      }
    }
  }
}

std::span<const std::uint8_t> view_mask(const MultiViewDataset& data, Index v) {
  return {data.mask().row(v).data(), static_cast<std::size_t>(data.instance_count())};
}

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

double normalization_factor(const MultiViewDataset& data) {
  const double n = static_cast<double>(data.instance_count());
  const double d_ave = data.average_view_dim();
  return 1.0 / (n * n * d_ave * d_ave);
}

double reconstruction_term(const DecoderGrid& nets, const SubspaceSet& s,
                           const MultiViewDataset& data) {
  check_model(nets, s, data);
  const double phi = normalization_factor(data);
  double total = 0.0;
  for (Index m = 0; m < s.count(); ++m)
    for (Index v = 0; v < data.view_count(); ++v)
      total += masked_squared_error(nets.at(m, v), s[m], data.view(v), view_mask(data, v), phi);
  return total;
}

double l1_term(const SubspaceSet& s) {
  double total = 0.0;
  for (const Matrix& h : s.subspaces) total += h.cwiseAbs().sum();
  return total;
}

double total_loss_j1(const DecoderGrid& nets, const SubspaceSet& s, const MultiViewDataset& data,
                     const TrainConfig& config) {
  const double recon = reconstruction_term(nets, s, data);
  if (config.lambda == 0.0 || s.count() < 2) return recon;
  return recon + config.lambda * pairwise_hsic(s);
}

double total_loss_j2(const DecoderGrid& nets, const SubspaceSet& s, const MultiViewDataset& data,
                     const TrainConfig& config) {
  const double j1 = total_loss_j1(nets, s, data, config);
  if (config.alpha == 0.0) return j1;
  return j1 + config.alpha * l1_term(s);
}

double training_loss(const DecoderGrid& nets, const SubspaceSet& s, const MultiViewDataset& data,
                     const TrainConfig& config) {
  return config.alpha > 0.0 ? total_loss_j2(nets, s, data, config)
                            : total_loss_j1(nets, s, data, config);
}

std::vector<NetGradient> decoder_gradients(const DecoderGrid& nets, const SubspaceSet& s,
                                           const MultiViewDataset& data) {
  check_model(nets, s, data);
  const double phi = normalization_factor(data);
  std::vector<NetGradient> grads;
  grads.reserve(nets.nets().size());
  for (Index m = 0; m < s.count(); ++m) {
    for (Index v = 0; v < data.view_count(); ++v) {
      DecoderGrad g = backward(nets.at(m, v), s[m], data.view(v), view_mask(data, v), phi);
      grads.push_back({std::move(g.w1), std::move(g.b1), std::move(g.w2), std::move(g.b2)});
    }
  }
  return grads;
}

Matrix subspace_gradient(const DecoderGrid& nets, const SubspaceSet& s,
                         const MultiViewDataset& data, const TrainConfig& config, Index m) {
  check_model(nets, s, data);
  const double phi = normalization_factor(data);
  Matrix grad = Matrix::Zero(s.dim(), s.instance_count());
  // Fixed accumulation order: views, then other subspaces, then l1.
  for (Index v = 0; v < data.view_count(); ++v)
    grad += backward(nets.at(m, v), s[m], data.view(v), view_mask(data, v), phi).input;
  if (config.lambda != 0.0) {
    for (Index k = 0; k < s.count(); ++k)
      if (k != m) grad += config.lambda * hsic_gradient(s[m], s[k]);
  }
  if (config.alpha > 0.0) grad += config.alpha * s[m].unaryExpr(&sign0);
  return grad;
}

LossGradients loss_gradients(const DecoderGrid& nets, const SubspaceSet& s,
                             const MultiViewDataset& data, const TrainConfig& config) {
  LossGradients out;
  out.nets = decoder_gradients(nets, s, data);
  out.subspaces.reserve(static_cast<std::size_t>(s.count()));
  for (Index m = 0; m < s.count(); ++m)
    out.subspaces.push_back(subspace_gradient(nets, s, data, config, m));
  return out;
}

}  // namespace divclust
