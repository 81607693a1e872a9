#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"

using namespace csc;
using namespace csc::testing;

namespace {

/// Dense system matrix M^T M + gamma (g(L) + rho I).
Matrix dense_system(const EigenBasis& b, const PolyFilter& g, double gamma, double rho, const SamplingSet& m) {
  const std::size_t n = b.size();
  Matrix a = spectral_apply(b, [&](double l) { return g(l); }, Matrix::identity(n));
  for (double& v : a.values()) v *= gamma;
  for (std::size_t i = 0; i < n; ++i) a(i, i) += gamma * rho;
  for (std::size_t idx : m.indices) a(idx, idx) += 1.0;
  return a;
}

}  // namespace

TEST(DrawSampling, FullDrawIsEveryNode) {
  auto s = draw_sampling(25, 25, 3);
  for (std::size_t i = 0; i < 25; ++i) EXPECT_EQ(s.indices[i], i);
}

TEST(DrawSampling, DistinctSortedReproducible) {
  auto a = draw_sampling(1000, 120, 7);
  auto b = draw_sampling(1000, 120, 7);
  EXPECT_EQ(a.indices, b.indices);
  std::set<std::size_t> uniq(a.indices.begin(), a.indices.end());
  EXPECT_EQ(uniq.size(), 120u);
  EXPECT_TRUE(std::is_sorted(a.indices.begin(), a.indices.end()));
  EXPECT_LT(a.indices.back(), 1000u);
}

TEST(DrawSampling, RespectsEligibleSet) {
  std::vector<std::size_t> eligible{1, 3, 5, 7, 9};
  auto s = draw_sampling(10, eligible, 3, 1);
  for (std::size_t i : s.indices) EXPECT_EQ(i % 2, 1u);
  EXPECT_THROW(draw_sampling(10, eligible, 6, 1), ValidationError);
  EXPECT_THROW(draw_sampling(10, 11, 1), ValidationError);
  EXPECT_THROW(draw_sampling(10, 0, 1), ValidationError);
}

TEST(DrawSampling, RestrictThenExtendIsIdentityOnSamples) {
  auto s = draw_sampling(30, 8, 2);
  std::vector<double> x(30);
  for (std::size_t i = 0; i < 30; ++i) x[i] = static_cast<double>(i) + 0.5;
  auto y = s.extend(s.restrict(x));
  for (std::size_t i = 0; i < 30; ++i) {
    const bool sampled = std::binary_search(s.indices.begin(), s.indices.end(), i);
    EXPECT_EQ(y[i], sampled ? x[i] : 0.0);
  }
}

TEST(DrawSampling, UniformInclusionChiSquare) {
  const std::size_t n_nodes = 20, n = 5, draws = 4000;
  std::vector<double> count(n_nodes, 0.0);
  for (std::size_t t = 0; t < draws; ++t)
    for (std::size_t i : draw_sampling(n_nodes, n, t).indices) count[i] += 1.0;
  const double expected = static_cast<double>(draws * n) / n_nodes;
  double chi2 = 0.0;
  for (double c : count) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 36.19);  // 0.99 quantile of chi-square with 19 degrees of freedom
}

TEST(DrawSampling, RipOnEqualClusters) {
  // k disjoint equal cliques: span(U_k) is the span of the cluster indicators,
  // and (N/n)||Mx||^2 concentrates around ||x||^2 once every cluster is hit often.
  Graph g = disjoint_cliques(4, 25);
  auto b = dense_eig(LaplacianOp(g));
  Matrix uk = b.leading(4);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> gauss;
  int fails = 0;
  for (std::uint64_t draw = 0; draw < 20; ++draw) {
    auto s = draw_sampling(100, 60, draw);
    for (int t = 0; t < 20; ++t) {
      std::vector<double> a(4);
      for (double& v : a) v = gauss(rng);
      std::vector<double> x(100, 0.0);
      for (std::size_t i = 0; i < 100; ++i) x[i] = dot(uk.row(i), a);
      const auto mx = s.restrict(x);
      const double ratio = (100.0 / 60.0) * dot(mx, mx) / dot(x, x);
      fails += std::abs(ratio - 1.0) > 0.5;
    }
  }
  EXPECT_LE(fails, 20);
}

TEST(Interpolate, RecoversDisjointCliqueIndicators) {
  Graph g = disjoint_cliques(3, 12);
  LaplacianOp op(g);
  auto truth = block_labels(3, 12);
  auto s = draw_sampling(36, 9, 4);
  std::set<std::size_t> hit;
  for (std::size_t i : s.indices) hit.insert(truth[i]);
  ASSERT_EQ(hit.size(), 3u);
  std::vector<std::size_t> reduced_labels;
  for (std::size_t i : s.indices) reduced_labels.push_back(truth[i]);
  InterpolationConfig cfg;
  cfg.highpass = design_highpass(0.5, 50);
  auto res = interpolate(op, cfg, s, labels_to_indicators(reduced_labels, 3));
  for (bool c : res.converged) EXPECT_TRUE(c);
  for (std::size_t j = 0; j < 3; ++j) {
    double in_min = 1e300, out_max = -1e300;
    for (std::size_t i = 0; i < 36; ++i)
      (truth[i] == j ? in_min : out_max) = truth[i] == j ? std::min(in_min, res.x(i, j)) : std::max(out_max, res.x(i, j));
    EXPECT_GT(in_min, out_max);
  }
  EXPECT_EQ(assign(res.x).labels, truth);
}

TEST(Interpolate, ZeroDataGivesZero) {
  Graph g = random_graph(50, 0.1, 2);
  LaplacianOp op(g);
  auto s = draw_sampling(50, 10, 1);
  InterpolationConfig cfg;
  cfg.gamma = 1e6;
  cfg.highpass = design_highpass(0.5, 30);
  auto x = interpolate(op, cfg, s, std::vector<double>(10, 0.0));
  for (double v : x) EXPECT_EQ(v, 0.0);
}

TEST(Interpolate, MatchesDenseDirectSolve) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Graph g = random_graph(150, 0.05, seed);
    LaplacianOp op(g);
    auto b = dense_eig(op);
    auto s = draw_sampling(150, 30, seed);
    InterpolationConfig cfg;
    cfg.highpass = design_highpass(b.eigenvalues[4], 50);
    cfg.solver_tol = 1e-12;
    cfg.max_iters = 5000;
    Matrix c = random_matrix(30, 2, seed);
    auto res = interpolate(op, cfg, s, c);
    Matrix a = dense_system(b, cfg.highpass, cfg.gamma, res.ridge, s);
    for (std::size_t j = 0; j < 2; ++j) {
      std::vector<double> rhs(150, 0.0);
      for (std::size_t r = 0; r < 30; ++r) rhs[s.indices[r]] = c(r, j);
      const auto x = dense_solve(a, rhs);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < 150; ++i) {
        num += (res.x(i, j) - x[i]) * (res.x(i, j) - x[i]);
        den += x[i] * x[i];
      }
      EXPECT_LE(std::sqrt(num / den), 1e-6);
    }
  }
}

TEST(Interpolate, PreconditionerDoesNotChangeSolution) {
  Graph g = random_graph(200, 0.04, 8);
  LaplacianOp op(g);
  auto s = draw_sampling(200, 40, 2);
  InterpolationConfig cfg;
  cfg.highpass = design_highpass(0.4, 50);
  cfg.solver_tol = 1e-10;
  cfg.max_iters = 5000;
  Matrix c = random_matrix(40, 3, 4);
  auto with = interpolate(op, cfg, s, c);
  cfg.preconditioner = false;
  auto without = interpolate(op, cfg, s, c);
  // Both stop at a 1e-10 residual; the system is ill-conditioned so the gap is larger.
  EXPECT_LE(relative_error(with.x, without.x), 1e-5);
}

TEST(Interpolate, SystemIsPositiveSemidefinite) {
  Graph g = random_graph(120, 0.05, 5);
  LaplacianOp op(g);
  auto b = dense_eig(op);
  auto s = draw_sampling(120, 20, 3);
  auto high = design_highpass(0.3, 50);
  Matrix a = dense_system(b, high, 1e-3, positivity_ridge(high), s);
  for (std::uint64_t t = 0; t < 50; ++t) {
    Matrix x = random_matrix(120, 1, t);
    EXPECT_GE(dot(x.values(), multiply(a, x).values()), -1e-10);
  }
}

TEST(Interpolate, NonConvergenceKeepsBestIterate) {
  Graph g = random_graph(150, 0.05, 3);
  LaplacianOp op(g);
  auto s = draw_sampling(150, 20, 1);
  InterpolationConfig cfg;
  cfg.highpass = design_highpass(0.4, 50);
  cfg.max_iters = 2;
  cfg.solver_tol = 1e-14;
  auto res = interpolate(op, cfg, s, random_matrix(20, 2, 1));
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_FALSE(res.converged[j]);
    EXPECT_EQ(res.iterations[j], 2u);
    EXPECT_GT(res.residuals[j], 0.0);
    EXPECT_LT(res.residuals[j], 1.0);
  }
}

TEST(Interpolate, Validation) {
  Graph g = path(10);
  LaplacianOp op(g);
  auto s = draw_sampling(10, 3, 1);
  InterpolationConfig cfg;
  EXPECT_THROW(interpolate(op, cfg, s, Matrix(3, 1)), ValidationError);  // no filter
  cfg.highpass = design_highpass(0.5, 10);
  EXPECT_THROW(interpolate(op, cfg, s, Matrix(4, 1)), ValidationError);
  cfg.gamma = 0.0;
  EXPECT_THROW(interpolate(op, cfg, s, Matrix(3, 1)), ValidationError);
}

TEST(Assign, OneHotIsIdentity) {
  std::vector<std::size_t> labels{2, 0, 1, 1, 0};
  EXPECT_EQ(assign(labels_to_indicators(labels, 3)).labels, labels);
}

TEST(Assign, InvariantToPositiveColumnScaling) {
  Matrix c = random_matrix(60, 4, 3);
  auto base = assign(c).labels;
  for (std::size_t i = 0; i < 60; ++i) {
    c(i, 0) *= 7.0;
    c(i, 2) *= 0.01;
  }
  EXPECT_EQ(assign(c).labels, base);
}

TEST(Assign, EveryNodeLabelled) {
  Matrix c = random_matrix(100, 5, 9);
  auto a = assign(c);
  ASSERT_EQ(a.labels.size(), 100u);
  for (std::size_t l : a.labels) EXPECT_LT(l, 5u);
  EXPECT_TRUE(a.tied_nodes.empty());
}

TEST(Assign, TiesAndZeroRows) {
  Matrix c(3, 2);
  c(0, 0) = 1.0;
  c(0, 1) = 1.0;  // both columns have unit norm, so node 0 is a tie
  c(1, 0) = 0.0;
  c(1, 1) = 0.0;  // all-zero row
  c(2, 0) = 0.0;
  c(2, 1) = 0.0;
  auto a = assign(c);
  EXPECT_EQ(a.labels[0], 0u);
  EXPECT_EQ(a.labels[1], 0u);
  EXPECT_EQ(a.tied_nodes, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_THROW(assign(Matrix(3, 2)), ValidationError);
}

TEST(Assign, ZeroColumnNeverWins) {
  Matrix c(2, 2);
  c(0, 1) = -1.0;
  c(1, 1) = 2.0;
  auto a = assign(c);
  EXPECT_EQ(a.labels[0], 1u);
  EXPECT_EQ(a.labels[1], 1u);
}
