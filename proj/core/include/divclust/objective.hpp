#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "divclust/common.hpp"
#include "divclust/dataset.hpp"
#include "divclust/decoder.hpp"
#include "divclust/hsic.hpp"

namespace divclust {

/// How each parameter block moves along its negative gradient.
enum class StepRule {
  fixed,         // x -= learning_rate * grad
  backtracking,  // Armijo backtracking; learning_rate is the first trial step
  quasi_newton   // limited-memory BFGS within each block, Armijo line search
};

struct TrainConfig {
  double lambda = 1.0;         // diversity (HSIC) weight
  double alpha = 0.0;          // l1 sparsity weight; 0 selects the plain loss
  Index subspaces = 2;         // M
  Index dim = 4;               // subspace dimension d
  double learning_rate = 1e4;  // step for the fixed rule, first trial step otherwise
  int max_epochs = 200;
  double tol = 1e-5;           // relative loss change that counts as converged
  std::uint64_t seed = 0;
  std::optional<Index> hidden_dim;
  Index clusters = 3;          // K for the final k-means
  int kmeans_restarts = 10;
  StepRule step_rule = StepRule::backtracking;
  int inner_steps = 1;         // gradient steps per block per epoch
  double init_scale = 0.1;     // std of the initial subspace entries

  /// Throws ConfigError naming the first violated bound.
  void validate() const;
};

/// The M x V decoders, stored subspace-major: at(m, v) maps subspace m to view v.
class DecoderGrid {
 public:
  DecoderGrid() = default;
  DecoderGrid(Index subspaces, Index views, std::vector<DecoderNet> nets);

  Index subspaces() const noexcept { return subspaces_; }
  Index views() const noexcept { return views_; }

  DecoderNet& at(Index m, Index v) { return nets_.at(index(m, v)); }
  const DecoderNet& at(Index m, Index v) const { return nets_.at(index(m, v)); }

  std::vector<DecoderNet>& nets() noexcept { return nets_; }
  const std::vector<DecoderNet>& nets() const noexcept { return nets_; }

 private:
  std::size_t index(Index m, Index v) const {
    return static_cast<std::size_t>(m * views_ + v);
  }

  Index subspaces_ = 0;
  Index views_ = 0;
  std::vector<DecoderNet> nets_;
};

/// Phi = 1 / (N^2 * d_ave^2), d_ave the mean view dimension.
double normalization_factor(const MultiViewDataset& data);

/// Phi * sum_m sum_v sum_i mask(v, i) * ||x_i^v - f_m^v(h_i^m)||^2.
double reconstruction_term(const DecoderGrid& nets, const SubspaceSet& s,
                           const MultiViewDataset& data);

/// sum_m ||H^m||_1 (entry-wise absolute sum).
double l1_term(const SubspaceSet& s);

/// reconstruction + lambda * sum over pairs m < m' of hsic(H^m, H^m').
double total_loss_j1(const DecoderGrid& nets, const SubspaceSet& s, const MultiViewDataset& data,
                     const TrainConfig& config);

/// total_loss_j1 + alpha * l1_term. Equals total_loss_j1 exactly when alpha = 0.
double total_loss_j2(const DecoderGrid& nets, const SubspaceSet& s, const MultiViewDataset& data,
                     const TrainConfig& config);

/// Loss minimised by training: J2 when alpha > 0, else J1.
double training_loss(const DecoderGrid& nets, const SubspaceSet& s, const MultiViewDataset& data,
                     const TrainConfig& config);

/// Parameter gradients for one decoder.
struct NetGradient {
  Matrix w1;
  Vector b1;
  Matrix w2;
  Vector b2;
};

struct LossGradients {
  std::vector<NetGradient> nets;  // same layout as DecoderGrid
  std::vector<Matrix> subspaces;  // one dim x N matrix per subspace
};

/// Gradients of the reconstruction term with respect to every decoder
/// (the only term that depends on decoder parameters).
std::vector<NetGradient> decoder_gradients(const DecoderGrid& nets, const SubspaceSet& s,
                                           const MultiViewDataset& data);

/// Gradient of the training loss with respect to H^m: the V masked
/// reconstruction back-propagations, lambda-weighted HSIC gradients against
/// every other subspace and, when alpha > 0, alpha * sign(H^m) with sign(0) = 0.
Matrix subspace_gradient(const DecoderGrid& nets, const SubspaceSet& s,
                         const MultiViewDataset& data, const TrainConfig& config, Index m);

/// All gradients of the training loss at one point.
LossGradients loss_gradients(const DecoderGrid& nets, const SubspaceSet& s,
                             const MultiViewDataset& data, const TrainConfig& config);

}  // namespace divclust
