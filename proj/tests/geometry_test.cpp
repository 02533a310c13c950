#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "dlsh/dataset_io.hpp"
#include "dlsh/dispersion.hpp"
#include "dlsh/generators.hpp"
#include "dlsh/geometry.hpp"

using namespace dlsh;

namespace {

Dataset line(std::vector<double> xs) {
  std::vector<Point> pts;
  for (double x : xs) pts.push_back({x});
  return Dataset::from_points(pts, Metric::l2);
}

}  // namespace

TEST(Distance, ThreeFourFive) {
  EXPECT_DOUBLE_EQ(distance(Point{0, 0}, Point{3, 4}, Metric::l2), 5.0);
  EXPECT_DOUBLE_EQ(distance(Point{1, 1}, Point{1, 1}, Metric::l2), 0.0);
  EXPECT_DOUBLE_EQ(distance(Point{0, 0}, Point{3, 4}, Metric::l1), 7.0);
}

TEST(Distance, DimensionMismatchThrows) {
  EXPECT_THROW(distance(Point{0, 0}, Point{1, 2, 3}, Metric::l2), dimension_error);
}

TEST(Distance, TriangleInequalityOnRandomTriples) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 5.0);
  std::uniform_int_distribution<int> dim(1, 12);
  for (Metric m : {Metric::l1, Metric::l2}) {
    for (int trial = 0; trial < 2000; ++trial) {
      const int d = dim(rng);
      Point a(d), b(d), c(d);
      for (int k = 0; k < d; ++k) {
        a[k] = g(rng);
        b[k] = g(rng);
        c[k] = g(rng);
      }
      const double ab = distance(a, b, m), bc = distance(b, c, m), ac = distance(a, c, m);
      ASSERT_LE(ac, ab + bc + 1e-9);
      ASSERT_DOUBLE_EQ(ab, distance(b, a, m));
    }
  }
}

TEST(Dataset, RejectsNonFiniteAndEmpty) {
  EXPECT_THROW(Dataset({1.0, std::nan("")}, 1, Metric::l2), argument_error);
  EXPECT_THROW(Dataset({}, 2, Metric::l2), argument_error);
  EXPECT_THROW(Dataset({1.0, 2.0, 3.0}, 2, Metric::l2), argument_error);
}

TEST(BruteForceNear, LineExample) {
  const auto ds = line({0, 1, 2, 10});
  EXPECT_EQ(brute_force_near(ds, Point{0.5}, 1.0), (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(brute_force_near(ds, Point{5.0}, 0.0).empty());
  EXPECT_EQ(brute_force_near(ds, Point{10.0}, 0.0), (std::vector<std::size_t>{3}));
  EXPECT_THROW(brute_force_near(ds, Point{1.0, 2.0}, 1.0), dimension_error);
}

TEST(BruteForceNear, IdentityWithDuplicates) {
  const auto ds = line({3, 1, 3, 7});
  EXPECT_EQ(brute_force_near(ds, ds.row(2), 0.0), (std::vector<std::size_t>{0, 2}));
  const auto cube = generate(GeneratorKind::uniform_cube, {.n = 50, .d = 3}, 4);
  for (std::size_t i = 0; i < cube.size(); ++i) {
    const auto hits = brute_force_near(cube, cube.row(i), 0.0);
    EXPECT_NE(std::find(hits.begin(), hits.end(), i), hits.end());
  }
}

TEST(Generate, LatticeDefinition) {
  const auto ds = generate(GeneratorKind::lattice, {.n = 4, .d = 1, .gap = 1.0}, 0);
  ASSERT_EQ(ds.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(ds.row(i)[0], static_cast<double>(i));
}

TEST(Generate, LatticeHasNoPairsBelowGap) {
  const auto ds = generate(GeneratorKind::lattice, {.n = 100, .d = 2, .gap = 2.0}, 0);
  double min_gap = 1e300;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = i + 1; j < ds.size(); ++j) min_gap = std::min(min_gap, ds.distance(i, j));
  }
  EXPECT_GE(min_gap, 2.0);
  EXPECT_EQ(count_near_pairs(ds, 1.9, 1.0), 0u);
}

TEST(Generate, ZeroSigmaClustersCoincide) {
  const auto ds = generate(GeneratorKind::gaussian_clusters, {.n = 12, .d = 3, .clusters = 3, .sigma = 0.0}, 9);
  // 3 clusters of 4 coincident points: 3 * C(4,2) intra-cluster pairs at any beta > 0.
  EXPECT_GE(count_near_pairs(ds, 1e-9, 1.0), 18u);
}

TEST(Generate, ReproducibleForSameSeed) {
  for (auto kind : {GeneratorKind::uniform_cube, GeneratorKind::gaussian_clusters, GeneratorKind::sparse,
                    GeneratorKind::curve_1d}) {
    GeneratorParams p{.n = 40, .d = 5, .bend = 0.3};
    EXPECT_EQ(generate(kind, p, 77), generate(kind, p, 77));
    EXPECT_FALSE(generate(kind, p, 77) == generate(kind, p, 78));
  }
}

TEST(Generate, CurveIsOneDimensionalSegmentWithoutBend) {
  const auto ds = generate(GeneratorKind::curve_1d, {.n = 30, .d = 6, .extent = 5.0}, 3);
  // Collinear points: for every triple the largest distance equals the sum of the other two.
  for (std::size_t i = 2; i < ds.size(); ++i) {
    double a = ds.distance(0, 1), b = ds.distance(1, i), c = ds.distance(0, i);
    const double big = std::max({a, b, c});
    EXPECT_NEAR(2 * big, a + b + c, 1e-9);
  }
}

TEST(Generate, RejectsBadParameters) {
  EXPECT_THROW(generate(GeneratorKind::uniform_cube, {.n = 0, .d = 2}, 1), argument_error);
  EXPECT_THROW(generate(GeneratorKind::uniform_cube, {.n = 2, .d = 0}, 1), argument_error);
  EXPECT_THROW(generate(GeneratorKind::sparse, {.n = 2, .d = 2, .density = 0.0}, 1), argument_error);
  EXPECT_THROW(generate(GeneratorKind::sparse, {.n = 2, .d = 2, .density = 1.5}, 1), argument_error);
}

TEST(DatasetIo, BinaryRoundTripIsBitExact) {
  for (auto metric : {Metric::l1, Metric::l2}) {
    const auto ds = generate(GeneratorKind::gaussian_clusters, {.n = 64, .d = 7, .metric = metric}, 5);
    std::stringstream buf;
    write_dataset(buf, ds);
    EXPECT_EQ(read_dataset(buf), ds);
  }
}

TEST(DatasetIo, HeaderLayout) {
  const auto ds = line({1.5, -2});
  std::stringstream buf;
  write_dataset(buf, ds);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.size(), 4u + 4 + 8 + 4 + 8 + 2 * 8);
  EXPECT_EQ(bytes.substr(0, 4), "DLSH");
  EXPECT_EQ(bytes[4], 1);   // version, little-endian
  EXPECT_EQ(bytes[8], 2);   // n
  EXPECT_EQ(bytes[16], 1);  // d
}

TEST(DatasetIo, WrongMagicIsFormatError) {
  std::stringstream buf("DLSQ\x01\x00\x00\x00");
  EXPECT_THROW(read_dataset(buf), format_error);
}

TEST(DatasetIo, TruncatedPayloadIsFormatError) {
  const auto ds = generate(GeneratorKind::uniform_cube, {.n = 10, .d = 3}, 1);
  std::stringstream buf;
  write_dataset(buf, ds);
  std::string bytes = buf.str();
  bytes.resize(bytes.size() - 5);
  std::stringstream cut(bytes);
  EXPECT_THROW(read_dataset(cut), format_error);
}

TEST(DatasetIo, CsvThreeByTwo) {
  std::stringstream in("1,2\n3.5,4\n-1e-3,0\n");
  const auto ds = read_dataset_csv(in);
  EXPECT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.dim(), 2u);
  EXPECT_DOUBLE_EQ(ds.row(2)[0], -1e-3);
}

TEST(DatasetIo, CsvHeaderAndRoundTrip) {
  const auto ds = generate(GeneratorKind::uniform_cube, {.n = 20, .d = 4}, 8);
  std::stringstream buf;
  write_dataset_csv(buf, ds);
  EXPECT_EQ(buf.str().rfind("# n=20 d=4\n", 0), 0u);
  EXPECT_EQ(read_dataset_csv(buf), ds);

  std::stringstream bad("# n=5 d=2\n1,2\n");
  EXPECT_THROW(read_dataset_csv(bad), format_error);
  std::stringstream ragged("1,2\n3\n");
  EXPECT_THROW(read_dataset_csv(ragged), format_error);
}

TEST(DatasetIo, FileDispatchByExtension) {
  const auto dir = std::filesystem::temp_directory_path() / "dlsh_geometry_test";
  std::filesystem::create_directories(dir);
  const auto ds = generate(GeneratorKind::lattice, {.n = 9, .d = 2, .gap = 0.5}, 1);
  save_dataset(ds, dir / "a.bin");
  save_dataset(ds, dir / "a.csv");
  EXPECT_EQ(load_dataset(dir / "a.bin"), ds);
  EXPECT_EQ(load_dataset(dir / "a.csv"), ds);
  std::filesystem::remove_all(dir);
}
