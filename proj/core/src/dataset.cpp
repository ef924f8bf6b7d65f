#include "divclust/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "text_io.hpp"

namespace divclust {

namespace fs = std::filesystem;

MultiViewDataset::MultiViewDataset(std::vector<Matrix> views, PresenceMask mask)
    : views_(std::move(views)), mask_(std::move(mask)) {
  if (views_.empty()) throw ShapeError("dataset needs at least one view");
  if (mask_.rows() != view_count()) {
    throw ShapeError("mask has " + std::to_string(mask_.rows()) + " rows for " +
                     std::to_string(view_count()) + " views");
  }
  const Index n = mask_.cols();
  if (n < 1) throw ShapeError("dataset needs at least one instance");
  for (Index v = 0; v < view_count(); ++v) {
    const Matrix& x = views_[static_cast<std::size_t>(v)];
    if (x.cols() != n) {
      throw ShapeError("view " + std::to_string(v) + " has " + std::to_string(x.cols()) +
                       " instances, expected " + std::to_string(n));
    }
    if (x.rows() < 1) throw ShapeError("view " + std::to_string(v) + " has no features");
  }
  for (Index i = 0; i < n; ++i) {
    int observed = 0;
    for (Index v = 0; v < view_count(); ++v) {
      const auto flag = mask_(v, i);
      if (flag > 1) {
        throw InvariantError("mask entry (" + std::to_string(v) + ", " + std::to_string(i) +
                             ") is not 0/1");
      }
      observed += flag;
    }
    if (observed == 0) {
      throw InvariantError("instance " + std::to_string(i) + " is observed in no view");
    }
  }
}

MultiViewDataset::MultiViewDataset(std::vector<Matrix> views)
    : MultiViewDataset(views, [&] {
        if (views.empty()) throw ShapeError("dataset needs at least one view");
        return PresenceMask::Ones(static_cast<Index>(views.size()), views.front().cols()).eval();
      }()) {}

std::vector<Index> MultiViewDataset::view_dims() const {
  std::vector<Index> dims;
  dims.reserve(views_.size());
  for (const auto& x : views_) dims.push_back(x.rows());
  return dims;
}

double MultiViewDataset::average_view_dim() const {
  double total = 0.0;
  for (const auto& x : views_) total += static_cast<double>(x.rows());
  return total / static_cast<double>(views_.size());
}

Index MultiViewDataset::observed_count(Index v) const {
  return mask_.row(v).cast<Index>().sum();
}

double missing_rate(const PresenceMask& mask) {
  const double cells = static_cast<double>(mask.size());
  if (cells == 0) throw ShapeError("empty mask");
  const double present = static_cast<double>(mask.cast<Index>().sum());
  return 1.0 - present / cells;
}

namespace {

// Size k of an erased subset, drawn with weight C(observed, k) for k in
// [1, cap], which makes the subset uniform over nonempty proper subsets
// whenever cap = observed - 1.
Index draw_subset_size(Index observed, Index cap, std::mt19937_64& rng) {
  std::vector<double> weights(static_cast<std::size_t>(cap));
  double binom = 1.0;
  for (Index k = 1; k <= cap; ++k) {
    binom = binom * static_cast<double>(observed - k + 1) / static_cast<double>(k);
    weights[static_cast<std::size_t>(k - 1)] = binom;
  }
  std::discrete_distribution<Index> pick(weights.begin(), weights.end());
  return pick(rng) + 1;
}

}  // namespace

MultiViewDataset erase_views(const MultiViewDataset& dataset, double target_rate,
                             std::uint64_t seed) {
  const Index n_views = dataset.view_count();
  const Index n = dataset.instance_count();
  const double max_rate = 1.0 - 1.0 / static_cast<double>(n_views);
  if (!(target_rate >= 0.0) || target_rate > max_rate + 1e-12) {
    throw InfeasibleError("target missing rate " + std::to_string(target_rate) +
                          " outside [0, " + std::to_string(max_rate) +
                          "]; every instance must keep one view");
  }

  PresenceMask mask = dataset.mask();
  const Index cells = n_views * n;
  const auto target_missing =
      std::min<Index>(static_cast<Index>(std::llround(target_rate * static_cast<double>(cells))),
                      (n_views - 1) * n);
  const Index already_missing = cells - mask.cast<Index>().sum();
  if (already_missing > target_missing) {
    throw InfeasibleError("dataset already misses " + std::to_string(already_missing) +
                          " cells, more than the target of " + std::to_string(target_missing));
  }
  Index budget = target_missing - already_missing;

  std::mt19937_64 rng(seed);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Index> present;
  for (Index i : order) {
    if (budget == 0) break;
    present.clear();
    for (Index v = 0; v < n_views; ++v)
      if (mask(v, i)) present.push_back(v);
    const auto observed = static_cast<Index>(present.size());
    const Index cap = std::min(observed - 1, budget);
    if (cap < 1) continue;
    const Index k = draw_subset_size(observed, cap, rng);
    // Partial Fisher-Yates: the first k entries become a uniform k-subset.
    for (Index j = 0; j < k; ++j) {
      std::uniform_int_distribution<Index> pick(j, observed - 1);
      std::swap(present[static_cast<std::size_t>(j)],
                present[static_cast<std::size_t>(pick(rng))]);
      mask(present[static_cast<std::size_t>(j)], i) = 0;
    }
    budget -= k;
  }

  // Greedy remainder, same instance order, one view at a time.
  for (Index i : order) {
    if (budget == 0) break;
    Index observed = mask.col(i).cast<Index>().sum();
    for (Index v = n_views - 1; v >= 0 && budget > 0 && observed > 1; --v) {
      if (mask(v, i)) {
        mask(v, i) = 0;
        --observed;
        --budget;
      }
    }
  }

  std::vector<Matrix> views = dataset.views();
  for (Index v = 0; v < n_views; ++v)
    for (Index i = 0; i < n; ++i)
      if (!mask(v, i)) views[static_cast<std::size_t>(v)].col(i).setZero();
  return MultiViewDataset(std::move(views), std::move(mask));
}

std::vector<Matrix> mean_fill(const MultiViewDataset& dataset) {
  std::vector<Matrix> filled;
  filled.reserve(static_cast<std::size_t>(dataset.view_count()));
  for (Index v = 0; v < dataset.view_count(); ++v) {
    const Matrix& x = dataset.view(v);
    const Index observed = dataset.observed_count(v);
    if (observed == 0) {
      throw DegenerateError("view " + std::to_string(v) + " has no observed instance");
    }
    Vector mean = Vector::Zero(x.rows());
    for (Index i = 0; i < x.cols(); ++i)
      if (dataset.observed(v, i)) mean += x.col(i);
    mean /= static_cast<double>(observed);
    Matrix out = x;
    for (Index i = 0; i < x.cols(); ++i)
      if (!dataset.observed(v, i)) out.col(i) = mean;
    filled.push_back(std::move(out));
  }
  return filled;
}

MultiViewDataset standardize(const MultiViewDataset& dataset) {
  std::vector<Matrix> views;
  views.reserve(static_cast<std::size_t>(dataset.view_count()));
  for (Index v = 0; v < dataset.view_count(); ++v) {
    const Matrix& x = dataset.view(v);
    const Index observed = dataset.observed_count(v);
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    if (observed > 0) {
      Vector mean = Vector::Zero(x.rows());
      for (Index i = 0; i < x.cols(); ++i)
        if (dataset.observed(v, i)) mean += x.col(i);
      mean /= static_cast<double>(observed);
      Vector var = Vector::Zero(x.rows());
      for (Index i = 0; i < x.cols(); ++i)
        if (dataset.observed(v, i)) var += (x.col(i) - mean).cwiseAbs2();
      var /= static_cast<double>(observed);
      const Vector scale = var.unaryExpr([](double s2) { return s2 > 0.0 ? 1.0 / std::sqrt(s2) : 1.0; });
      for (Index i = 0; i < x.cols(); ++i)
        if (dataset.observed(v, i)) out.col(i) = (x.col(i) - mean).cwiseProduct(scale);
    }
    views.push_back(std::move(out));
  }
  return MultiViewDataset(std::move(views), dataset.mask());
}

MultiViewDataset zero_unobserved(const MultiViewDataset& dataset) {
  std::vector<Matrix> views = dataset.views();
  for (Index v = 0; v < dataset.view_count(); ++v)
    for (Index i = 0; i < dataset.instance_count(); ++i)
      if (!dataset.observed(v, i)) views[static_cast<std::size_t>(v)].col(i).setZero();
  return MultiViewDataset(std::move(views), dataset.mask());
}

namespace {

nlohmann::json read_meta(const fs::path& dir) {
  const fs::path path = dir / "meta.json";
  try {
    return nlohmann::json::parse(detail::read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace

MultiViewDataset load_dataset(const fs::path& dir, const LoadOptions& options) {
  const nlohmann::json meta = read_meta(dir);
  Index n_views = 0;
  Index n = 0;
  std::vector<Index> dims;
  try {
    n_views = meta.at("V").get<Index>();
    n = meta.at("N").get<Index>();
    dims = meta.at("view_dims").get<std::vector<Index>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError((dir / "meta.json").string() + ": " + e.what());
  }
  if (n_views < 1 || static_cast<Index>(dims.size()) != n_views) {
    throw ParseError((dir / "meta.json").string() + ": view_dims does not list V entries");
  }

  std::vector<Matrix> views;
  for (Index v = 0; v < n_views; ++v) {
    const std::string name = "view_" + std::to_string(v) + ".csv";
    Matrix x = detail::parse_csv_matrix(detail::read_text(dir / name), name);
    if (x.rows() != dims[static_cast<std::size_t>(v)]) {
      throw ShapeError(name + " has " + std::to_string(x.rows()) + " rows, meta.json says " +
                       std::to_string(dims[static_cast<std::size_t>(v)]));
    }
    if (x.cols() != n) {
      throw ShapeError(name + " has " + std::to_string(x.cols()) + " columns, expected N = " +
                       std::to_string(n));
    }
    views.push_back(std::move(x));
  }

  const Matrix raw_mask = detail::parse_csv_matrix(detail::read_text(dir / "mask.csv"), "mask.csv");
  if (raw_mask.rows() != n_views || raw_mask.cols() != n) {
    throw ShapeError("mask.csv is " + std::to_string(raw_mask.rows()) + "x" +
                     std::to_string(raw_mask.cols()) + ", expected " + std::to_string(n_views) +
                     "x" + std::to_string(n));
  }
  PresenceMask mask(n_views, n);
  for (Index v = 0; v < n_views; ++v) {
    for (Index i = 0; i < n; ++i) {
      const double flag = raw_mask(v, i);
      if (flag != 0.0 && flag != 1.0) {
        throw ParseError("mask.csv row " + std::to_string(v) + " column " + std::to_string(i) +
                         ": expected 0 or 1");
      }
      mask(v, i) = flag == 1.0 ? 1 : 0;
    }
  }

  MultiViewDataset dataset(std::move(views), std::move(mask));
  return options.standardize ? standardize(dataset) : zero_unobserved(dataset);
}

LabelSets load_labels(const fs::path& dir) {
  const nlohmann::json meta = read_meta(dir);
  LabelSets labels;
  if (auto it = meta.find("labels"); it != meta.end()) {
    try {
      labels = it->get<LabelSets>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError((dir / "meta.json").string() + ": labels: " + e.what());
    }
  }
  return labels;
}

void save_dataset(const fs::path& dir, const MultiViewDataset& dataset, const LabelSets& labels) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  for (Index v = 0; v < dataset.view_count(); ++v) {
    detail::write_text_atomic(dir / ("view_" + std::to_string(v) + ".csv"),
                              detail::format_csv_matrix(dataset.view(v)));
  }
  detail::write_text_atomic(dir / "mask.csv", detail::format_csv_matrix(dataset.mask()));

  nlohmann::json meta;
  meta["V"] = dataset.view_count();
  meta["N"] = dataset.instance_count();
  meta["view_dims"] = dataset.view_dims();
  if (!labels.empty()) meta["labels"] = labels;
  detail::write_text_atomic(dir / "meta.json", meta.dump(2) + "\n");
}

}  // namespace divclust
