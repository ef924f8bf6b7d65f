#pragma once

#include <filesystem>
#include <vector>

#include "divclust/dataset.hpp"
#include "divclust/objective.hpp"

namespace divclust {

struct TrainState {
  DecoderGrid nets;
  SubspaceSet subspaces;
  int epoch = 0;
  double initial_loss = 0.0;         // training loss before the first epoch
  std::vector<double> loss_history;  // one post-update entry per epoch
  bool converged = false;

  // Per-block step sizes carried between epochs by the backtracking rule,
  // nets first (subspace-major), then subspaces. Empty until first use.
  std::vector<double> step_sizes;
};

/// Subspace entries init_scale * N(0, 1), decoders per init_decoder, all
/// drawn from config.seed. Throws ConfigError.
TrainState init_state(const MultiViewDataset& data, const TrainConfig& config);

/// One alternation: every decoder takes a step against the current
/// subspaces, then every subspace takes a step against the updated decoders.
/// Appends the post-update training loss. Throws DivergenceError (carrying the
/// epoch index) if the loss becomes non-finite.
TrainState train_epoch(TrainState state, const MultiViewDataset& data, const TrainConfig& config);

/// Relative change between the last two recorded losses (the initial loss
/// counts as the entry before epoch 1). Infinity before the first epoch.
double relative_change(const TrainState& state);

/// Runs train_epoch until relative_change < tol or max_epochs is reached.
TrainState fit(const MultiViewDataset& data, const TrainConfig& config);

/// Observed entries copied from the dataset; each missing (v, i) column is
/// the average over subspaces of the decoder reconstruction f_m^v(h_i^m).
std::vector<Matrix> complete_missing(const TrainState& state, const MultiViewDataset& data);

/// Decoder archive extended with subspaces and training history.
void save_checkpoint(const std::filesystem::path& path, const TrainState& state);
TrainState load_checkpoint(const std::filesystem::path& path);

}  // namespace divclust
