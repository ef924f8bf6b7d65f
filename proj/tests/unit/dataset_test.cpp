#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "divclust/dataset.hpp"
#include "support/oracles.hpp"

using namespace divclust;

namespace {

PresenceMask mask_from(std::initializer_list<std::initializer_list<int>> rows) {
  PresenceMask m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index r = 0;
  for (const auto& row : rows) {
    Index c = 0;
    for (int x : row) m(r, c++) = static_cast<std::uint8_t>(x);
    ++r;
  }
  return m;
}

MultiViewDataset random_dataset(std::vector<Index> dims, Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Matrix> views;
  for (Index d : dims) views.push_back(oracle::random_matrix(d, n, rng));
  return MultiViewDataset(std::move(views));
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("divclust_dataset_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST(MissingRate, MatchesDirectArithmetic) {
  PresenceMask full(3, 4);
  full.setOnes();
  EXPECT_EQ(missing_rate(full), 0.0);
  EXPECT_EQ(missing_rate(mask_from({{1, 1}, {0, 0}})), 0.5);
  EXPECT_EQ(missing_rate(mask_from({{1, 1, 1, 0}, {1, 0, 1, 1}})), 0.25);
}

TEST(MultiViewDataset, RejectsInconsistentShapes) {
  std::vector<Matrix> views{Matrix::Zero(2, 4), Matrix::Zero(3, 3)};
  EXPECT_THROW(MultiViewDataset{views}, ShapeError);
}

TEST(MultiViewDataset, RejectsInstanceWithNoView) {
  std::vector<Matrix> views{Matrix::Zero(2, 3), Matrix::Zero(3, 3)};
  EXPECT_THROW(MultiViewDataset(views, mask_from({{1, 0, 1}, {1, 0, 1}})), InvariantError);
}

TEST(EraseViews, ZeroTargetLeavesMaskUnchanged) {
  const auto ds = random_dataset({3, 4}, 20, 1);
  const auto out = erase_views(ds, 0.0, 5);
  EXPECT_EQ(out.mask(), ds.mask());
  for (Index v = 0; v < 2; ++v) EXPECT_EQ(out.view(v), ds.view(v));
}

TEST(EraseViews, HitsTargetAndKeepsOneViewPerInstance) {
  const auto ds = random_dataset({3, 4}, 100, 2);
  const auto out = erase_views(ds, 0.3, 7);
  EXPECT_NEAR(missing_rate(out.mask()), 0.3, 0.005);
  for (Index i = 0; i < 100; ++i) EXPECT_GE(out.mask().col(i).cast<int>().sum(), 1);
}

TEST(EraseViews, InfeasibleAboveOneViewBound) {
  const auto ds = random_dataset({3, 4}, 10, 3);
  EXPECT_THROW(erase_views(ds, 0.6, 1), InfeasibleError);
}

TEST(EraseViews, PropertiesOverRandomTargets) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const Index v_count = 2 + trial % 3;
    const Index n = 5 + trial * 3;
    std::vector<Index> dims;
    for (Index v = 0; v < v_count; ++v) dims.push_back(1 + (v + trial) % 4);
    const auto ds = random_dataset(dims, n, static_cast<std::uint64_t>(trial));
    const double bound = 1.0 - 1.0 / static_cast<double>(v_count);
    const double target = std::uniform_real_distribution<double>(0.0, bound)(rng);
    const auto out = erase_views(ds, target, static_cast<std::uint64_t>(trial));
    const double tol = 1.0 / static_cast<double>(v_count * n);
    EXPECT_NEAR(missing_rate(out.mask()), target, tol + 1e-12) << "trial " << trial;
    for (Index i = 0; i < n; ++i) EXPECT_GE(out.mask().col(i).cast<int>().sum(), 1);
    for (Index v = 0; v < v_count; ++v)
      for (Index i = 0; i < n; ++i) {
        if (out.observed(v, i))
          EXPECT_EQ(out.view(v).col(i), ds.view(v).col(i));
        else
          EXPECT_TRUE(out.view(v).col(i).isZero(0.0));
      }
    const auto again = erase_views(ds, target, static_cast<std::uint64_t>(trial));
    EXPECT_EQ(again.mask(), out.mask());
  }
}

TEST(MeanFill, FillsWithObservedColumnMean) {
  Matrix x(2, 3);
  x << 1, 3, 0,
       3, 5, 0;
  std::vector<Matrix> views{x, Matrix::Ones(1, 3)};
  const MultiViewDataset ds(views, mask_from({{1, 1, 0}, {1, 1, 1}}));
  const auto filled = mean_fill(ds);
  EXPECT_EQ(filled[0].col(2), Vector((Vector(2) << 2, 4).finished()));
  EXPECT_EQ(filled[0].leftCols(2), x.leftCols(2));
}

TEST(MeanFill, RandomErasureMatchesOnePassMeans) {
  const auto ds = erase_views(random_dataset({2, 3, 4}, 30, 4), 0.3, 11);
  const auto filled = mean_fill(ds);
  for (Index v = 0; v < ds.view_count(); ++v) {
    Vector sum = Vector::Zero(ds.view_dim(v));
    double count = 0;
    for (Index i = 0; i < ds.instance_count(); ++i)
      if (ds.observed(v, i)) {
        sum += ds.view(v).col(i);
        count += 1;
      }
    const Vector mean = sum / count;
    for (Index i = 0; i < ds.instance_count(); ++i) {
      if (ds.observed(v, i))
        EXPECT_EQ(filled[static_cast<std::size_t>(v)].col(i), ds.view(v).col(i));
      else
        EXPECT_LT((filled[static_cast<std::size_t>(v)].col(i) - mean).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(MeanFill, ViewWithoutObservationIsDegenerate) {
  std::vector<Matrix> views{Matrix::Ones(2, 2), Matrix::Ones(1, 2)};
  const MultiViewDataset ds(views, mask_from({{1, 1}, {0, 0}}));
  EXPECT_THROW(mean_fill(ds), DegenerateError);
}

TEST(Standardize, ObservedEntriesGetZeroMeanUnitVariance) {
  const auto ds = erase_views(random_dataset({3, 2}, 40, 6), 0.25, 2);
  const auto z = standardize(ds);
  for (Index v = 0; v < z.view_count(); ++v)
    for (Index r = 0; r < z.view_dim(v); ++r) {
      double s = 0, s2 = 0, n = 0;
      for (Index i = 0; i < z.instance_count(); ++i) {
        if (!z.observed(v, i)) {
          EXPECT_EQ(z.view(v)(r, i), 0.0);
          continue;
        }
        s += z.view(v)(r, i);
        s2 += z.view(v)(r, i) * z.view(v)(r, i);
        n += 1;
      }
      EXPECT_NEAR(s / n, 0.0, 1e-12);
      EXPECT_NEAR(s2 / n, 1.0, 1e-9);
    }
}

TEST(DatasetIo, RoundTripsThroughDirectory) {
  const auto dir = scratch("roundtrip");
  const auto ds = erase_views(random_dataset({2, 3}, 7, 8), 0.2, 3);
  save_dataset(dir, ds, {{"truth", {0, 1, 0, 1, 2, 2, 0}}});
  const auto back = load_dataset(dir, {.standardize = false});
  EXPECT_EQ(back.mask(), ds.mask());
  for (Index v = 0; v < 2; ++v) EXPECT_EQ(back.view(v), ds.view(v));
  EXPECT_EQ(load_labels(dir).at("truth"), (std::vector<int>{0, 1, 0, 1, 2, 2, 0}));
}

TEST(DatasetIo, FullyObservedFileGivesAllOnesMask) {
  const auto dir = scratch("allones");
  std::filesystem::create_directories(dir);
  write(dir / "view_0.csv", "1,2,3\n4,5,6\n");
  write(dir / "view_1.csv", "7,8,9\n");
  write(dir / "mask.csv", "1,1,1\n1,1,1\n");
  write(dir / "meta.json", R"({"V": 2, "N": 3, "view_dims": [2, 1]})");
  const auto ds = load_dataset(dir, {.standardize = false});
  EXPECT_EQ(ds.view_count(), 2);
  EXPECT_EQ(ds.instance_count(), 3);
  EXPECT_TRUE((ds.mask().array() == 1).all());
}

TEST(DatasetIo, ColumnCountMismatchIsShapeError) {
  const auto dir = scratch("shape");
  std::filesystem::create_directories(dir);
  write(dir / "view_0.csv", "1,2,3,4\n");
  write(dir / "view_1.csv", "7,8,9\n");
  write(dir / "mask.csv", "1,1,1\n1,1,1\n");
  write(dir / "meta.json", R"({"V": 2, "N": 3, "view_dims": [1, 1]})");
  EXPECT_THROW(load_dataset(dir), ShapeError);
}

TEST(DatasetIo, EmptyMaskColumnIsInvariantError) {
  const auto dir = scratch("emptycol");
  std::filesystem::create_directories(dir);
  write(dir / "view_0.csv", "1,2,3\n");
  write(dir / "view_1.csv", "7,8,9\n");
  write(dir / "mask.csv", "1,0,1\n1,0,1\n");
  write(dir / "meta.json", R"({"V": 2, "N": 3, "view_dims": [1, 1]})");
  EXPECT_THROW(load_dataset(dir), InvariantError);
}

TEST(DatasetIo, MalformedNumberNamesTheRow) {
  const auto dir = scratch("malformed");
  std::filesystem::create_directories(dir);
  write(dir / "view_0.csv", "1,2,3\n4,x,6\n");
  write(dir / "view_1.csv", "7,8,9\n");
  write(dir / "mask.csv", "1,1,1\n1,1,1\n");
  write(dir / "meta.json", R"({"V": 2, "N": 3, "view_dims": [2, 1]})");
  try {
    load_dataset(dir);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("view_0"), std::string::npos) << what;
    EXPECT_NE(what.find("row 1"), std::string::npos) << what;
  }
}
