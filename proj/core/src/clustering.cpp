#include "divclust/clustering.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <string>

namespace divclust {

void Labeling::validate() const {
  if (labels.empty()) throw InvariantError("labeling is empty");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k) {
      throw InvariantError("label " + std::to_string(labels[i]) + " at instance " +
                           std::to_string(i) + " outside [0, " + std::to_string(k) + ")");
    }
  }
}

int Labeling::nonempty_clusters() const {
  std::vector<bool> seen(static_cast<std::size_t>(std::max(k, 0)), false);
  int count = 0;
  for (int l : labels) {
    if (l >= 0 && l < k && !seen[static_cast<std::size_t>(l)]) {
      seen[static_cast<std::size_t>(l)] = true;
      ++count;
    }
  }
  return count;
}

double wcss(const Matrix& points, const Labeling& labeling) {
  if (labeling.size() != points.cols()) {
    throw ShapeError("labeling covers " + std::to_string(labeling.size()) + " points, matrix has " +
                     std::to_string(points.cols()));
  }
  labeling.validate();
  Matrix sums = Matrix::Zero(points.rows(), labeling.k);
  std::vector<Index> counts(static_cast<std::size_t>(labeling.k), 0);
  for (Index i = 0; i < points.cols(); ++i) {
    const int l = labeling.labels[static_cast<std::size_t>(i)];
    sums.col(l) += points.col(i);
    ++counts[static_cast<std::size_t>(l)];
  }
  for (int c = 0; c < labeling.k; ++c)
    if (counts[static_cast<std::size_t>(c)] > 0) sums.col(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
  double total = 0.0;
  for (Index i = 0; i < points.cols(); ++i)
    total += (points.col(i) - sums.col(labeling.labels[static_cast<std::size_t>(i)])).squaredNorm();
  return total;
}

namespace {

struct Run {
  std::vector<int> labels;
  double wcss = std::numeric_limits<double>::infinity();
};

Matrix seed_plus_plus(const Matrix& points, int k, std::mt19937_64& rng) {
  const Index n = points.cols();
  Matrix centers(points.rows(), k);
  std::uniform_int_distribution<Index> first(0, n - 1);
  centers.col(0) = points.col(first(rng));
  Vector best = (points.colwise() - centers.col(0)).colwise().squaredNorm().transpose();
  for (int c = 1; c < k; ++c) {
    const double total = best.sum();
    Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      chosen = n - 1;
      for (Index i = 0; i < n; ++i) {
        target -= best(i);
        if (target < 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      // All points coincide with a chosen centre; any point will do.
      chosen = first(rng);
    }
    centers.col(c) = points.col(chosen);
    best = best.cwiseMin((points.colwise() - centers.col(c)).colwise().squaredNorm().transpose());
  }
  return centers;
}

int nearest(const Matrix& centers, const auto& point, double* dist = nullptr) {
  int arg = 0;
  double d_best = std::numeric_limits<double>::infinity();
  for (Index c = 0; c < centers.cols(); ++c) {
    const double d = (centers.col(c) - point).squaredNorm();
    if (d < d_best) {
      d_best = d;
      arg = static_cast<int>(c);
    }
  }
  if (dist) *dist = d_best;
  return arg;
}

Run lloyd(const Matrix& points, int k, std::mt19937_64& rng, int max_iterations) {
  const Index n = points.cols();
  Matrix centers = seed_plus_plus(points, k, rng);
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  std::vector<double> dist(static_cast<std::size_t>(n), 0.0);

  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      const int l = nearest(centers, points.col(i), &dist[static_cast<std::size_t>(i)]);
      if (l != labels[static_cast<std::size_t>(i)]) {
        labels[static_cast<std::size_t>(i)] = l;
        changed = true;
      }
    }

    // Repair empty clusters with the point farthest from its own centroid,
    // never emptying a singleton in the process.
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Index far = -1;
      double far_dist = -1.0;
      for (Index i = 0; i < n; ++i) {
        const auto li = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
        if (counts[li] > 1 && dist[static_cast<std::size_t>(i)] > far_dist) {
          far_dist = dist[static_cast<std::size_t>(i)];
          far = i;
        }
      }
      --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
      labels[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      dist[static_cast<std::size_t>(far)] = 0.0;
      changed = true;
    }

    centers.setZero();
    for (Index i = 0; i < n; ++i) centers.col(labels[static_cast<std::size_t>(i)]) += points.col(i);
    for (int c = 0; c < k; ++c) centers.col(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);

    if (!changed) break;
  }

  Run run;
  run.labels = std::move(labels);
  run.wcss = wcss(points, Labeling{run.labels, k});
  return run;
}

}  // namespace

Labeling kmeans(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& options) {
  if (k < 1) throw ConfigError("k-means needs k >= 1");
  if (options.restarts < 1) throw ConfigError("k-means needs at least one restart");
  if (k > points.cols()) {
    throw InfeasibleError("k-means with k = " + std::to_string(k) + " on " +
                          std::to_string(points.cols()) + " points");
  }
  if (!points.allFinite()) throw InvariantError("k-means input has non-finite entries");

  std::mt19937_64 rng(seed);
  Run best;
  for (int r = 0; r < options.restarts; ++r) {
    Run run = lloyd(points, k, rng, options.max_iterations);
    if (run.wcss < best.wcss) best = std::move(run);
  }
  return Labeling{std::move(best.labels), k};
}

std::vector<Labeling> generate_clusterings(const SubspaceSet& s, int k, std::uint64_t seed,
                                           const KMeansOptions& options) {
  std::vector<Labeling> out;
  out.reserve(static_cast<std::size_t>(s.count()));
  for (Index m = 0; m < s.count(); ++m)
    out.push_back(kmeans(s[m], k, derive_seed(seed, static_cast<std::uint64_t>(m)), options));
  return out;
}

}  // namespace divclust
