#include "divclust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

namespace divclust {

namespace {

void check_points(const Matrix& points, const Labeling& labeling) {
  if (labeling.size() != points.cols()) {
    throw ShapeError("labeling covers " + std::to_string(labeling.size()) + " points, matrix has " +
                     std::to_string(points.cols()));
  }
  labeling.validate();
  if (labeling.nonempty_clusters() < 2) {
    throw DegenerateError("metric needs at least two nonempty clusters");
  }
}

Matrix pairwise_distances(const Matrix& points) {
  const Index n = points.cols();
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (points.col(i) - points.col(j)).norm();
  }
  return d;
}

double binom2(double n) { return n * (n - 1.0) / 2.0; }

// Contingency counts keyed by (label in a, label in b).
struct Contingency {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows;
  std::map<int, double> cols;
  double n = 0.0;
};

Contingency contingency(const Labeling& a, const Labeling& b) {
  if (a.size() != b.size()) {
    throw ShapeError("labelings have lengths " + std::to_string(a.size()) + " and " +
                     std::to_string(b.size()));
  }
  Contingency t;
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    t.joint[{a.labels[i], b.labels[i]}] += 1.0;
    t.rows[a.labels[i]] += 1.0;
    t.cols[b.labels[i]] += 1.0;
  }
  t.n = static_cast<double>(a.labels.size());
  return t;
}

double entropy(const std::map<int, double>& counts, double n) {
  double h = 0.0;
  for (const auto& [label, c] : counts) {
    const double p = c / n;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double silhouette(const Matrix& points, const Labeling& labeling) {
  check_points(points, labeling);
  const Index n = points.cols();
  const int k = labeling.k;
  const Matrix dist = pairwise_distances(points);
  std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labeling.labels) ++sizes[static_cast<std::size_t>(l)];

  double total = 0.0;
  std::vector<double> to_cluster(static_cast<std::size_t>(k));
  for (Index i = 0; i < n; ++i) {
    const int own = labeling.labels[static_cast<std::size_t>(i)];
    if (sizes[static_cast<std::size_t>(own)] <= 1) continue;
    std::fill(to_cluster.begin(), to_cluster.end(), 0.0);
    for (Index j = 0; j < n; ++j)
      to_cluster[static_cast<std::size_t>(labeling.labels[static_cast<std::size_t>(j)])] += dist(i, j);
    const double a = to_cluster[static_cast<std::size_t>(own)] /
                     static_cast<double>(sizes[static_cast<std::size_t>(own)] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == own || sizes[static_cast<std::size_t>(c)] == 0) continue;
      b = std::min(b, to_cluster[static_cast<std::size_t>(c)] / static_cast<double>(sizes[static_cast<std::size_t>(c)]));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

double dunn_index(const Matrix& points, const Labeling& labeling) {
  check_points(points, labeling);
  const Index n = points.cols();
  double min_between = std::numeric_limits<double>::infinity();
  double max_diameter = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double d = (points.col(i) - points.col(j)).norm();
      if (labeling.labels[static_cast<std::size_t>(i)] == labeling.labels[static_cast<std::size_t>(j)])
        max_diameter = std::max(max_diameter, d);
      else
        min_between = std::min(min_between, d);
    }
  }
  if (max_diameter == 0.0) throw DegenerateError("Dunn index undefined: every cluster has zero diameter");
  return min_between / max_diameter;
}

double nmi(const Labeling& a, const Labeling& b) {
  const Contingency t = contingency(a, b);
  if (t.n == 0.0) return 0.0;
  const double ha = entropy(t.rows, t.n);
  const double hb = entropy(t.cols, t.n);
  if (ha <= 0.0 || hb <= 0.0) return 0.0;
  double mi = 0.0;
  for (const auto& [key, c] : t.joint) {
    const double pab = c / t.n;
    const double pa = t.rows.at(key.first) / t.n;
    const double pb = t.cols.at(key.second) / t.n;
    mi += pab * std::log(pab / (pa * pb));
  }
  return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

double jaccard(const Labeling& a, const Labeling& b) {
  const Contingency t = contingency(a, b);
  double both = 0.0;
  for (const auto& [key, c] : t.joint) both += binom2(c);
  double pairs_a = 0.0;
  for (const auto& [label, c] : t.rows) pairs_a += binom2(c);
  double pairs_b = 0.0;
  for (const auto& [label, c] : t.cols) pairs_b += binom2(c);
  const double denom = pairs_a + pairs_b - both;
  if (denom == 0.0) return 1.0;
  return both / denom;
}

MetricsReport evaluate(const SubspaceSet& s, const std::vector<Labeling>& clusterings) {
  const Index m_count = s.count();
  if (static_cast<Index>(clusterings.size()) != m_count) {
    throw ShapeError(std::to_string(clusterings.size()) + " clusterings for " +
                     std::to_string(m_count) + " subspaces");
  }
  MetricsReport report;
  for (Index m = 0; m < m_count; ++m) {
    const Labeling& c = clusterings[static_cast<std::size_t>(m)];
    report.silhouette.push_back(silhouette(s[m], c));
    report.dunn.push_back(dunn_index(s[m], c));
  }
  report.nmi = Matrix::Identity(m_count, m_count);
  report.jaccard = Matrix::Identity(m_count, m_count);
  double nmi_sum = 0.0;
  double jc_sum = 0.0;
  for (Index m = 0; m < m_count; ++m) {
    for (Index k = m + 1; k < m_count; ++k) {
      const auto& a = clusterings[static_cast<std::size_t>(m)];
      const auto& b = clusterings[static_cast<std::size_t>(k)];
      report.nmi(m, k) = report.nmi(k, m) = nmi(a, b);
      report.jaccard(m, k) = report.jaccard(k, m) = jaccard(a, b);
      nmi_sum += report.nmi(m, k);
      jc_sum += report.jaccard(m, k);
    }
  }
  const auto count = static_cast<double>(m_count);
  for (double v : report.silhouette) report.mean_silhouette += v / count;
  for (double v : report.dunn) report.mean_dunn += v / count;
  if (m_count > 1) {
    const double pairs = count * (count - 1.0) / 2.0;
    report.mean_nmi = nmi_sum / pairs;
    report.mean_jaccard = jc_sum / pairs;
  }
  return report;
}

namespace {

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string to_json(const MetricsReport& report, int indent) {
  nlohmann::json j;
  j["silhouette"] = report.silhouette;
  j["dunn"] = report.dunn;
  j["nmi"] = matrix_json(report.nmi);
  j["jaccard"] = matrix_json(report.jaccard);
  j["mean_silhouette"] = report.mean_silhouette;
  j["mean_dunn"] = report.mean_dunn;
  j["mean_nmi"] = optional_json(report.mean_nmi);
  j["mean_jaccard"] = optional_json(report.mean_jaccard);
  j["mean_diversity"] = optional_json(report.mean_diversity());
  j["evaluation_space"] = report.evaluation_space;
  return j.dump(indent);
}

}  // namespace divclust
