#include <gtest/gtest.h>

#include <filesystem>

#include "test_support.hpp"

using namespace csc;
using namespace csc::testing;

TEST(Defaults, NaturalLogRoundedUp) {
  EXPECT_EQ(default_num_samples(20), 120u);  // ceil(40 ln 20) = ceil(119.83)
  EXPECT_EQ(default_num_signals(120), 20u);  // ceil(4 ln 120) = ceil(19.15)
  EXPECT_EQ(default_num_samples(3), 7u);     // ceil(6 ln 3) = ceil(6.59)
  EXPECT_EQ(default_num_signals(7), 8u);     // ceil(4 ln 7) = ceil(7.78)
}

TEST(GenerateSignals, ColumnEnergyMatchesVariance) {
  const std::size_t n = 500, d = 10;
  double total = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto sig = generate_signals(n, d, SignalDistribution::gaussian, s);
    for (std::size_t j = 0; j < d; ++j) {
      const auto col = sig.r.column(j);
      total += dot(col, col);
    }
  }
  const double mean = total / (100.0 * d);
  EXPECT_NEAR(mean, static_cast<double>(n) / d, 0.05 * n / d);
}

TEST(GenerateSignals, BernoulliEntries) {
  auto sig = generate_signals(200, 16, SignalDistribution::bernoulli, 3);
  int pos = 0;
  for (double v : sig.r.values()) {
    EXPECT_DOUBLE_EQ(std::abs(v), 0.25);
    pos += v > 0;
  }
  EXPECT_NEAR(pos, 1600, 150);
}

TEST(GenerateSignals, Deterministic) {
  auto a = generate_signals(100, 7, SignalDistribution::gaussian, 42);
  auto b = generate_signals(100, 7, SignalDistribution::gaussian, 42);
  auto c = generate_signals(100, 7, SignalDistribution::gaussian, 43);
  EXPECT_TRUE(a.r == b.r);
  EXPECT_FALSE(a.r == c.r);
  EXPECT_THROW(generate_signals(10, 0, SignalDistribution::gaussian, 1), ValidationError);
}

TEST(BuildFeatures, IdealFilterCollapsesEachClique) {
  Graph g = disjoint_cliques(4, 10);
  auto b = dense_eig(LaplacianOp(g));
  auto sig = generate_signals(40, 12, SignalDistribution::gaussian, 5);
  auto f = build_features_with([&](const Matrix& x) { return project_leading(b, 4, x); }, sig);
  EXPECT_TRUE(f.normalized);
  EXPECT_TRUE(f.zero_rows.empty());
  for (std::size_t i = 0; i < 40; ++i) {
    EXPECT_NEAR(norm2(f.rows.row(i)), 1.0, 1e-12);
    for (std::size_t j = 0; j < 40; ++j)
      if (i / 10 == j / 10) {
        EXPECT_NEAR(pairwise_distance(f, i, j), 0.0, 1e-10);
      }
  }
  EXPECT_GT(pairwise_distance(f, 0, 10), 0.1);
}

TEST(BuildFeatures, PolynomialFilterRowsAreUnitNorm) {
  Graph g = random_graph(150, 0.05, 4);
  LaplacianOp op(g);
  auto sig = generate_signals(150, 20, SignalDistribution::gaussian, 1);
  auto f = build_features(op, design_lowpass(0.5, 50), sig);
  ASSERT_EQ(f.rows.rows(), 150u);
  ASSERT_EQ(f.row_norms.size(), 150u);
  for (std::size_t i = 0; i < 150; ++i)
    if (f.row_norms[i] > 0) {
      EXPECT_NEAR(norm2(f.rows.row(i)), 1.0, 1e-12);
    }
}

TEST(BuildFeatures, ZeroRowsAreFlaggedAndLeftZero) {
  auto sig = generate_signals(5, 3, SignalDistribution::gaussian, 1);
  auto f = build_features_with(
      [](const Matrix& x) {
        Matrix y = x;
        for (double& v : y.row(2)) v = 0.0;
        return y;
      },
      sig);
  EXPECT_EQ(f.zero_rows, std::vector<std::size_t>{2});
  for (double v : f.rows.row(2)) EXPECT_EQ(v, 0.0);
  EXPECT_FALSE(f.warnings.empty());
}

TEST(BuildFeatures, SingleSignalWarns) {
  auto sig = generate_signals(5, 1, SignalDistribution::gaussian, 1);
  auto f = build_features_with([](const Matrix& x) { return x; }, sig);
  EXPECT_FALSE(f.warnings.empty());
}

TEST(PairwiseDistance, MetricProperties) {
  auto sig = generate_signals(30, 6, SignalDistribution::gaussian, 2);
  auto f = build_features_with([](const Matrix& x) { return x; }, sig);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t i = rng() % 30, j = rng() % 30, l = rng() % 30;
    EXPECT_EQ(pairwise_distance(f, i, i), 0.0);
    EXPECT_EQ(pairwise_distance(f, i, j), pairwise_distance(f, j, i));
    EXPECT_LE(pairwise_distance(f, i, l), pairwise_distance(f, i, j) + pairwise_distance(f, j, l) + 1e-15);
  }
  EXPECT_THROW(pairwise_distance(f, 0, 30), ValidationError);
}

TEST(PairwiseDistance, RotationOfSignalsLeavesDistancesUnchanged) {
  Graph g = random_graph(80, 0.08, 6);
  LaplacianOp op(g);
  auto sig = generate_signals(80, 8, SignalDistribution::gaussian, 9);
  // Orthogonal 8x8 from the eigenvectors of a random symmetric matrix.
  Matrix a = random_matrix(8, 8, 3), s(8, 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) s(i, j) = a(i, j) + a(j, i);
  Matrix q = dense_eig(s).eigenvectors;
  RandomSignals rotated = sig;
  rotated.r = multiply(sig.r, q);
  auto filter = design_lowpass(0.6, 40);
  auto f1 = build_features(op, filter, sig);
  auto f2 = build_features(op, filter, rotated);
  for (std::size_t i = 0; i < 80; i += 3)
    for (std::size_t j = i + 1; j < 80; j += 5) EXPECT_NEAR(pairwise_distance(f1, i, j), pairwise_distance(f2, i, j), 1e-10);
}

TEST(FeatureDump, RoundTrip) {
  auto sig = generate_signals(12, 4, SignalDistribution::gaussian, 2);
  auto f = build_features_with([](const Matrix& x) { return x; }, sig);
  const auto path = (std::filesystem::temp_directory_path() / "csc_features.bin").string();
  dump_features(f, path);
  auto g = load_features(path);
  EXPECT_TRUE(g.rows == f.rows);
  EXPECT_TRUE(g.normalized);
  std::filesystem::remove(path);
}
