#include "divclust/trainer.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <string>

#include "divclust/archive.hpp"
#include "block_search.hpp"

namespace divclust {

namespace {

std::span<const std::uint8_t> view_mask(const MultiViewDataset& data, Index v) {
  return {data.mask().row(v).data(), static_cast<std::size_t>(data.instance_count())};
}

Vector pack(const DecoderNet& net) {
  Vector x(net.w1.size() + net.b1.size() + net.w2.size() + net.b2.size());
  Index o = 0;
  for (const auto* part : {&net.w1, &net.w2}) {
    x.segment(o, part->size()) = part->reshaped();
    o += part->size();
  }
  x.segment(o, net.b1.size()) = net.b1;
  o += net.b1.size();
  x.segment(o, net.b2.size()) = net.b2;
  return x;
}

void unpack(const Vector& x, DecoderNet& net) {
  Index o = 0;
  for (auto* part : {&net.w1, &net.w2}) {
    part->reshaped() = x.segment(o, part->size());
    o += part->size();
  }
  net.b1 = x.segment(o, net.b1.size());
  o += net.b1.size();
  net.b2 = x.segment(o, net.b2.size());
}

Vector pack(const DecoderGrad& g) {
  return pack(DecoderNet{g.w1, g.b1, g.w2, g.b2});
}

double hsic_against_others(const SubspaceSet& s, const Matrix& h, Index m) {
  double total = 0.0;
  for (Index k = 0; k < s.count(); ++k)
    if (k != m) total += hsic(h, s[k]);
  return total;
}

// Moves one flattened block. fg(x, g) returns the block loss and writes its
// gradient; `step` is the per-block state carried between epochs.
template <typename LossGrad>
void descend(Vector& x, double& step, const TrainConfig& config, LossGrad&& fg) {
  Vector g(x.size());
  switch (config.step_rule) {
    case StepRule::fixed:
      for (int k = 0; k < config.inner_steps; ++k) {
        fg(x, g);
        x -= config.learning_rate * g;
      }
      return;
    case StepRule::backtracking: {
      auto loss = [&](const Vector& p) {
        Vector unused(p.size());
        return fg(p, unused);
      };
      double trial = 2.0 * step;
      for (int k = 0; k < config.inner_steps; ++k) {
        const double f0 = fg(x, g);
        Vector next;
        double f1 = f0;
        const double t = detail::armijo(x, f0, g, Vector(-g), trial, loss, next, f1);
        if (t == 0.0) return;
        step = t;
        trial = 2.0 * t;
        x = std::move(next);
      }
      return;
    }
    case StepRule::quasi_newton:
      detail::lbfgs(x, config.inner_steps, step, fg);
      return;
  }
}

}  // namespace

TrainState init_state(const MultiViewDataset& data, const TrainConfig& config) {
  config.validate();
  if (config.subspaces > 1 && config.lambda > 0.0 && data.instance_count() < 2) {
    throw ConfigError("the diversity term needs at least two instances");
  }
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> z(0.0, 1.0);

  TrainState state;
  const Index n = data.instance_count();
  for (Index m = 0; m < config.subspaces; ++m) {
    Matrix h(config.dim, n);
    for (Index c = 0; c < n; ++c)
      for (Index r = 0; r < config.dim; ++r) h(r, c) = config.init_scale * z(rng);
    state.subspaces.subspaces.push_back(std::move(h));
  }
  std::vector<DecoderNet> nets;
  for (Index m = 0; m < config.subspaces; ++m) {
    for (Index v = 0; v < data.view_count(); ++v) {
      const Index out = data.view_dim(v);
      const Index hidden = config.hidden_dim.value_or(default_hidden_dim(config.dim, out));
      nets.push_back(init_decoder(config.dim, hidden, out, rng));
    }
  }
  state.nets = DecoderGrid(config.subspaces, data.view_count(), std::move(nets));
  state.initial_loss = training_loss(state.nets, state.subspaces, data, config);
  return state;
}

TrainState train_epoch(TrainState state, const MultiViewDataset& data, const TrainConfig& config) {
  config.validate();
  const Index n_sub = state.subspaces.count();
  const Index n_views = data.view_count();
  const double phi = normalization_factor(data);
  const double eta = config.learning_rate;
  const auto blocks = static_cast<std::size_t>(n_sub * n_views + n_sub);
  if (state.step_sizes.size() != blocks) state.step_sizes.assign(blocks, eta / 2.0);

  // Decoders first, against the subspaces as they were at the start of the epoch.
  for (Index v = 0; v < n_views; ++v) {
    const auto mask = view_mask(data, v);
    for (Index m = 0; m < n_sub; ++m) {
      DecoderNet& net = state.nets.at(m, v);
      const Matrix& h = state.subspaces[m];
      DecoderNet probe = net;
      Vector x = pack(net);
      descend(x, state.step_sizes[static_cast<std::size_t>(m * n_views + v)], config,
              [&](const Vector& p, Vector& g) {
                unpack(p, probe);
                g = pack(backward(probe, h, data.view(v), mask, phi));
                return masked_squared_error(probe, h, data.view(v), mask, phi);
              });
      unpack(x, net);
    }
  }

  // Then subspaces, against the updated decoders. H^m sees the already
  // updated H^0..H^{m-1}.
  for (Index m = 0; m < n_sub; ++m) {
    Vector x = state.subspaces[m].reshaped();
    descend(x, state.step_sizes[static_cast<std::size_t>(n_sub * n_views + m)], config,
            [&](const Vector& p, Vector& g) {
              Matrix& h = state.subspaces[m];
              h.reshaped() = p;
              g = subspace_gradient(state.nets, state.subspaces, data, config, m).reshaped();
              double f = 0.0;
              for (Index v = 0; v < n_views; ++v)
                f += masked_squared_error(state.nets.at(m, v), h, data.view(v), view_mask(data, v), phi);
              if (config.lambda != 0.0 && n_sub > 1)
                f += config.lambda * hsic_against_others(state.subspaces, h, m);
              if (config.alpha > 0.0) f += config.alpha * h.cwiseAbs().sum();
              return f;
            });
    state.subspaces[m].reshaped() = x;
  }

  ++state.epoch;
  const double loss = training_loss(state.nets, state.subspaces, data, config);
  if (!std::isfinite(loss)) {
    throw DivergenceError("training loss became non-finite at epoch " + std::to_string(state.epoch),
                          state.epoch);
  }
  state.loss_history.push_back(loss);
  state.converged = relative_change(state) < config.tol;
  return state;
}

double relative_change(const TrainState& state) {
  const auto& h = state.loss_history;
  if (h.empty()) return std::numeric_limits<double>::infinity();
  const double prev = h.size() >= 2 ? h[h.size() - 2] : state.initial_loss;
  const double cur = h.back();
  const double diff = std::abs(cur - prev);
  if (diff == 0.0) return 0.0;
  return diff / std::max(std::abs(prev), std::numeric_limits<double>::min());
}

TrainState fit(const MultiViewDataset& data, const TrainConfig& config) {
  TrainState state = init_state(data, config);
  while (state.epoch < config.max_epochs && !state.converged)
    state = train_epoch(std::move(state), data, config);
  return state;
}

std::vector<Matrix> complete_missing(const TrainState& state, const MultiViewDataset& data) {
  const Index n_sub = state.subspaces.count();
  std::vector<Matrix> completed = data.views();
  for (Index v = 0; v < data.view_count(); ++v) {
    std::vector<Index> missing;
    for (Index i = 0; i < data.instance_count(); ++i)
      if (!data.observed(v, i)) missing.push_back(i);
    if (missing.empty()) continue;
    Matrix fill = Matrix::Zero(data.view_dim(v), static_cast<Index>(missing.size()));
    for (Index m = 0; m < n_sub; ++m) {
      const Matrix h = state.subspaces[m](Eigen::all, missing);
      fill += forward(state.nets.at(m, v), h);
    }
    fill /= static_cast<double>(n_sub);
    completed[static_cast<std::size_t>(v)](Eigen::all, missing) = fill;
  }
  return completed;
}

namespace {

std::string net_key(Index m, Index v, const char* tensor) {
  return "net/" + std::to_string(m) + "/" + std::to_string(v) + "/" + tensor;
}

Vector to_vector(const std::vector<double>& xs) {
  Vector out(static_cast<Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) out(static_cast<Index>(i)) = xs[i];
  return out;
}

std::vector<double> from_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const TrainState& state) {
  TensorArchive archive;
  const Index n_sub = state.nets.subspaces();
  const Index n_views = state.nets.views();
  for (Index m = 0; m < n_sub; ++m) {
    for (Index v = 0; v < n_views; ++v) {
      const DecoderNet& net = state.nets.at(m, v);
      archive.put(net_key(m, v, "w1"), net.w1);
      archive.put_vector(net_key(m, v, "b1"), net.b1);
      archive.put(net_key(m, v, "w2"), net.w2);
      archive.put_vector(net_key(m, v, "b2"), net.b2);
    }
    archive.put("subspace/" + std::to_string(m), state.subspaces[m]);
  }
  Vector meta(5);
  meta << static_cast<double>(n_sub), static_cast<double>(n_views),
      static_cast<double>(state.epoch), state.converged ? 1.0 : 0.0, state.initial_loss;
  archive.put_vector("state/meta", meta);
  archive.put_vector("state/loss_history", to_vector(state.loss_history));
  archive.put_vector("state/step_sizes", to_vector(state.step_sizes));
  archive.save(path);
}

TrainState load_checkpoint(const std::filesystem::path& path) {
  const TensorArchive archive = TensorArchive::load(path);
  const Vector meta = archive.get_vector("state/meta");
  if (meta.size() != 5) throw ParseError(path.string() + ": malformed state/meta");
  const auto n_sub = static_cast<Index>(meta(0));
  const auto n_views = static_cast<Index>(meta(1));

  TrainState state;
  std::vector<DecoderNet> nets;
  for (Index m = 0; m < n_sub; ++m) {
    for (Index v = 0; v < n_views; ++v) {
      DecoderNet net{archive.get(net_key(m, v, "w1")), archive.get_vector(net_key(m, v, "b1")),
                     archive.get(net_key(m, v, "w2")), archive.get_vector(net_key(m, v, "b2"))};
      net.validate();
      nets.push_back(std::move(net));
    }
    state.subspaces.subspaces.push_back(archive.get("subspace/" + std::to_string(m)));
  }
  state.subspaces.validate();
  state.nets = DecoderGrid(n_sub, n_views, std::move(nets));
  state.epoch = static_cast<int>(meta(2));
  state.converged = meta(3) != 0.0;
  state.initial_loss = meta(4);
  state.loss_history = from_vector(archive.get_vector("state/loss_history"));
  state.step_sizes = from_vector(archive.get_vector("state/step_sizes"));
  return state;
}

}  // namespace divclust
