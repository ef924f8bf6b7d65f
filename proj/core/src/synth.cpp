#include "divclust/synth.hpp"

#include <algorithm>
#include <random>
#include <string>

#include <Eigen/LU>

#include "divclust/metrics.hpp"

namespace divclust {

void DualStructureParams::validate() const {
  if (clusters_a < 2 || clusters_b < 2) throw ConfigError("both planted structures need >= 2 clusters");
  if (instances < 4 * std::max(clusters_a, clusters_b)) {
    throw ConfigError("N = " + std::to_string(instances) + " is below 4 * max(Ka, Kb)");
  }
  if (view_dims.empty()) throw ConfigError("at least one view is required");
  for (std::size_t v = 0; v < view_dims.size(); ++v) {
    if (view_dims[v] < clusters_a + clusters_b) {
      throw ConfigError("view " + std::to_string(v) + " has dimension " +
                        std::to_string(view_dims[v]) + " < Ka + Kb");
    }
  }
  if (!(sigma >= 0.0)) throw ConfigError("noise scale must be >= 0");
}

namespace {

constexpr int kMaxRedraws = 1000;

Labeling draw_labels(Index n, int k, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, k - 1);
  Labeling l{std::vector<int>(static_cast<std::size_t>(n)), k};
  for (auto& x : l.labels) x = pick(rng);
  return l;
}

Matrix standard_normal(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = z(rng);
  return m;
}

}  // namespace

PlantedDataset make_dual_structure(const DualStructureParams& params) {
  params.validate();
  const Index n = params.instances;

  Labeling a;
  Labeling b;
  for (int attempt = 0;; ++attempt) {
    if (attempt == kMaxRedraws) {
      throw InfeasibleError("could not draw independent planted labels in " +
                            std::to_string(kMaxRedraws) + " attempts");
    }
    std::mt19937_64 rng(derive_seed(params.seed, static_cast<std::uint64_t>(attempt)));
    a = draw_labels(n, params.clusters_a, rng);
    b = draw_labels(n, params.clusters_b, rng);
    if (a.nonempty_clusters() == a.k && b.nonempty_clusters() == b.k && nmi(a, b) <= 0.1) break;
  }

  std::mt19937_64 rng(derive_seed(params.seed, 0xda7a));
  const int k_total = params.clusters_a + params.clusters_b;
  std::vector<Matrix> views;
  for (Index d_v : params.view_dims) {
    Matrix mixing;
    do {
      mixing = standard_normal(d_v, k_total, rng);
    } while (Eigen::FullPivLU<Matrix>(mixing).rank() < k_total);
    Matrix x = params.sigma * standard_normal(d_v, n, rng);
    for (Index i = 0; i < n; ++i) {
      x.col(i) += mixing.col(a.labels[static_cast<std::size_t>(i)]);
      x.col(i) += mixing.col(params.clusters_a + b.labels[static_cast<std::size_t>(i)]);
    }
    views.push_back(std::move(x));
  }

  return PlantedDataset{MultiViewDataset(std::move(views)), std::move(a), std::move(b), params};
}

void save_planted(const std::filesystem::path& dir, const PlantedDataset& planted) {
  save_dataset(dir, planted.dataset,
               {{"truth_a", planted.truth_a.labels}, {"truth_b", planted.truth_b.labels}});
}

}  // namespace divclust
