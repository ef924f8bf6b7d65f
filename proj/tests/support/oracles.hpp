#pragma once

// Independent reference implementations for tests. Everything here is written
// with plain loops over entries and deliberately shares no code with the
// library beyond the data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include "divclust/clustering.hpp"
#include "divclust/common.hpp"
#include "divclust/dataset.hpp"
#include "divclust/decoder.hpp"

namespace oracle {

using divclust::Index;
using divclust::Matrix;
using divclust::Vector;

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = z(rng);
  return m;
}

inline divclust::Labeling random_labels(Index n, int k, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, k - 1);
  divclust::Labeling l{std::vector<int>(static_cast<std::size_t>(n)), k};
  for (auto& x : l.labels) x = pick(rng);
  return l;
}

// ---- hsic ----

inline Matrix gram(const Matrix& h) {
  const Index n = h.cols();
  Matrix k(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      double s = 0.0;
      for (Index r = 0; r < h.rows(); ++r) s += h(r, i) * h(r, j);
      k(i, j) = s;
    }
  return k;
}

inline double hsic(const Matrix& h, const Matrix& g) {
  const Index n = h.cols();
  const Matrix k = gram(h);
  const Matrix l = gram(g);
  auto a = [n](Index i, Index j) { return (i == j ? 1.0 : 0.0) - 1.0 / static_cast<double>(n); };
  // tr(K A L A) = sum_{i,j,p,q} K_ij A_jp L_pq A_qi
  Matrix ka(n, n), la(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      double s1 = 0.0, s2 = 0.0;
      for (Index p = 0; p < n; ++p) {
        s1 += k(i, p) * a(p, j);
        s2 += l(i, p) * a(p, j);
      }
      ka(i, j) = s1;
      la(i, j) = s2;
    }
  double tr = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) tr += ka(i, j) * la(j, i);
  const double nm1 = static_cast<double>(n - 1);
  return tr / (nm1 * nm1);
}

// ---- decoder ----

inline Matrix forward(const divclust::DecoderNet& net, const Matrix& h) {
  Matrix out(net.w2.rows(), h.cols());
  std::vector<double> hidden(static_cast<std::size_t>(net.w1.rows()));
  for (Index c = 0; c < h.cols(); ++c) {
    for (Index j = 0; j < net.w1.rows(); ++j) {
      double s = net.b1(j);
      for (Index i = 0; i < net.w1.cols(); ++i) s += net.w1(j, i) * h(i, c);
      hidden[static_cast<std::size_t>(j)] = s > 0.0 ? s : 0.0;
    }
    for (Index o = 0; o < net.w2.rows(); ++o) {
      double s = net.b2(o);
      for (Index j = 0; j < net.w2.cols(); ++j) s += net.w2(o, j) * hidden[static_cast<std::size_t>(j)];
      out(o, c) = s;
    }
  }
  return out;
}

inline double masked_error(const divclust::DecoderNet& net, const Matrix& h, const Matrix& x,
                           const std::vector<std::uint8_t>& mask, double scale) {
  const Matrix y = oracle::forward(net, h);
  double total = 0.0;
  for (Index c = 0; c < x.cols(); ++c) {
    if (!mask[static_cast<std::size_t>(c)]) continue;
    for (Index r = 0; r < x.rows(); ++r) total += (x(r, c) - y(r, c)) * (x(r, c) - y(r, c));
  }
  return scale * total;
}

// ---- finite differences ----

// Central difference of f with respect to every entry of `param`, restoring it afterwards.
template <typename Param>
Matrix central_difference(Param& param, const std::function<double()>& f, double step = 1e-5) {
  Matrix g(param.rows(), param.cols());
  for (Index r = 0; r < param.rows(); ++r)
    for (Index c = 0; c < param.cols(); ++c) {
      const double keep = param(r, c);
      param(r, c) = keep + step;
      const double up = f();
      param(r, c) = keep - step;
      const double down = f();
      param(r, c) = keep;
      g(r, c) = (up - down) / (2.0 * step);
    }
  return g;
}

// Largest entry-wise relative error, with a floor on the denominator so that
// entries that are zero in both agree.
template <typename A, typename B>
double max_relative_error(const A& analytic, const B& numeric, double floor = 1e-8) {
  double worst = 0.0;
  for (Index r = 0; r < analytic.rows(); ++r)
    for (Index c = 0; c < analytic.cols(); ++c) {
      const double a = analytic(r, c);
      const double n = numeric(r, c);
      const double denom = std::max({std::abs(a), std::abs(n), floor});
      worst = std::max(worst, std::abs(a - n) / denom);
    }
  return worst;
}

// ---- metrics ----

inline double distance(const Matrix& p, Index i, Index j) {
  double s = 0.0;
  for (Index r = 0; r < p.rows(); ++r) s += (p(r, i) - p(r, j)) * (p(r, i) - p(r, j));
  return std::sqrt(s);
}

inline double silhouette(const Matrix& p, const divclust::Labeling& l) {
  const Index n = p.cols();
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const int own = l.labels[static_cast<std::size_t>(i)];
    double a_sum = 0.0;
    int a_count = 0;
    std::map<int, std::pair<double, int>> other;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const int lj = l.labels[static_cast<std::size_t>(j)];
      if (lj == own) {
        a_sum += distance(p, i, j);
        ++a_count;
      } else {
        other[lj].first += distance(p, i, j);
        other[lj].second += 1;
      }
    }
    if (a_count == 0) continue;  // singleton
    const double a = a_sum / a_count;
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [label, sc] : other) b = std::min(b, sc.first / sc.second);
    const double m = std::max(a, b);
    if (m > 0.0) total += (b - a) / m;
  }
  return total / static_cast<double>(n);
}

inline double dunn(const Matrix& p, const divclust::Labeling& l) {
  double inter = std::numeric_limits<double>::infinity();
  double diam = 0.0;
  for (Index i = 0; i < p.cols(); ++i)
    for (Index j = 0; j < p.cols(); ++j) {
      if (i == j) continue;
      const double d = distance(p, i, j);
      if (l.labels[static_cast<std::size_t>(i)] == l.labels[static_cast<std::size_t>(j)])
        diam = std::max(diam, d);
      else
        inter = std::min(inter, d);
    }
  return inter / diam;
}

inline double nmi(const divclust::Labeling& a, const divclust::Labeling& b) {
  const double n = static_cast<double>(a.labels.size());
  double ha = 0.0, hb = 0.0, mi = 0.0;
  for (int x = 0; x < a.k; ++x) {
    double ca = 0.0;
    for (int la : a.labels) ca += la == x;
    if (ca > 0) ha -= ca / n * std::log(ca / n);
  }
  for (int y = 0; y < b.k; ++y) {
    double cb = 0.0;
    for (int lb : b.labels) cb += lb == y;
    if (cb > 0) hb -= cb / n * std::log(cb / n);
  }
  for (int x = 0; x < a.k; ++x)
    for (int y = 0; y < b.k; ++y) {
      double cab = 0.0, ca = 0.0, cb = 0.0;
      for (std::size_t i = 0; i < a.labels.size(); ++i) {
        cab += a.labels[i] == x && b.labels[i] == y;
        ca += a.labels[i] == x;
        cb += b.labels[i] == y;
      }
      if (cab > 0) mi += cab / n * std::log(cab * n / (ca * cb));
    }
  if (ha <= 0.0 || hb <= 0.0) return 0.0;
  return mi / std::sqrt(ha * hb);
}

inline double jaccard(const divclust::Labeling& a, const divclust::Labeling& b) {
  double both = 0.0, only_a = 0.0, only_b = 0.0;
  for (std::size_t i = 0; i < a.labels.size(); ++i)
    for (std::size_t j = i + 1; j < a.labels.size(); ++j) {
      const bool sa = a.labels[i] == a.labels[j];
      const bool sb = b.labels[i] == b.labels[j];
      both += sa && sb;
      only_a += sa && !sb;
      only_b += !sa && sb;
    }
  const double denom = both + only_a + only_b;
  return denom == 0.0 ? 1.0 : both / denom;
}

// ---- clustering ----

inline double wcss(const Matrix& p, const std::vector<int>& labels, int k) {
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    Vector centre = Vector::Zero(p.rows());
    int count = 0;
    for (Index i = 0; i < p.cols(); ++i)
      if (labels[static_cast<std::size_t>(i)] == c) {
        centre += p.col(i);
        ++count;
      }
    if (count == 0) continue;
    centre /= count;
    for (Index i = 0; i < p.cols(); ++i)
      if (labels[static_cast<std::size_t>(i)] == c) total += (p.col(i) - centre).squaredNorm();
  }
  return total;
}

// Minimum WCSS over every split into two nonempty groups (point 0 fixed in group 0).
inline double best_two_partition(const Matrix& p) {
  const Index n = p.cols();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << (n - 1)); ++bits) {
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    for (Index i = 1; i < n; ++i) labels[static_cast<std::size_t>(i)] = (bits >> (i - 1)) & 1;
    best = std::min(best, wcss(p, labels, 2));
  }
  return best;
}

}  // namespace oracle
