#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <numbers>

#include "test_support.hpp"

using namespace csc;
using namespace csc::testing;

namespace {

/// Chebyshev coefficients of the step by discrete cosine quadrature.
std::vector<double> quadrature_coeffs(double cutoff, std::size_t p, std::size_t m = 200000) {
  std::vector<double> c(p + 1, 0.0);
  for (std::size_t q = 0; q < m; ++q) {
    const double theta = std::numbers::pi * (static_cast<double>(q) + 0.5) / static_cast<double>(m);
    const double f = std::cos(theta) + 1.0 <= cutoff ? 1.0 : 0.0;
    for (std::size_t l = 0; l <= p; ++l) c[l] += f * std::cos(static_cast<double>(l) * theta);
  }
  for (std::size_t l = 0; l <= p; ++l) c[l] *= (l == 0 ? 1.0 : 2.0) / static_cast<double>(m);
  return c;
}

/// Direct sum of c_l T_l(lambda - 1) with T_l(y) = cos(l arccos y).
double direct_eval(const std::vector<double>& c, double lambda) {
  const double t = std::acos(std::clamp(lambda - 1.0, -1.0, 1.0));
  double s = 0.0;
  for (std::size_t l = 0; l < c.size(); ++l) s += c[l] * std::cos(static_cast<double>(l) * t);
  return s;
}

}  // namespace

TEST(DesignLowpass, ClosedFormMatchesQuadrature) {
  for (double cutoff : {0.3, 1.0, 1.7}) {
    auto f = design_lowpass(cutoff, 30, Damping::none);
    auto q = quadrature_coeffs(cutoff, 30);
    for (std::size_t l = 0; l <= 30; ++l) EXPECT_NEAR(f.coeffs[l], q[l], 2e-5) << "cutoff " << cutoff << " l " << l;
  }
}

TEST(DesignLowpass, ClenshawMatchesDirectSum) {
  auto f = design_lowpass(0.7, 40);
  for (double x = 0.0; x <= 2.0; x += 0.01) EXPECT_NEAR(f(x), direct_eval(f.coeffs, x), 1e-12);
}

TEST(DesignLowpass, HighOrderPlainApproximatesStep) {
  auto f = design_lowpass(1.0, 200, Damping::none);
  EXPECT_NEAR(f(0.2), 1.0, 0.02);
  EXPECT_NEAR(f(1.8), 0.0, 0.02);
}

TEST(DesignLowpass, JacksonMultipliers) {
  auto g = jackson_coefficients(50);
  EXPECT_NEAR(g[0], 1.0, 1e-15);
  for (std::size_t l = 1; l < g.size(); ++l) {
    EXPECT_LT(g[l], g[l - 1]);
    EXPECT_GT(g[l], 0.0);
  }
}

TEST(DesignLowpass, JacksonSuppressesOvershoot) {
  auto plain = design_lowpass(0.8, 50, Damping::none);
  auto jackson = design_lowpass(0.8, 50, Damping::jackson);
  double plain_max = -1.0, jackson_max = -1.0, jackson_min = 1.0;
  for (int i = 0; i <= 20000; ++i) {
    const double x = 2.0 * i / 20000.0;
    plain_max = std::max(plain_max, plain(x));
    jackson_max = std::max(jackson_max, jackson(x));
    jackson_min = std::min(jackson_min, jackson(x));
  }
  EXPECT_GT(plain_max, 1.05);  // Gibbs
  EXPECT_LE(jackson_max, 1.02);
  EXPECT_GE(jackson_min, -0.02);
}

TEST(DesignLowpass, ValueAtZeroWithinErrorOfOne) {
  Graph g = random_graph(120, 0.06, 3);
  auto b = dense_eig(LaplacianOp(g));
  auto f = design_lowpass(0.5 * (b.eigenvalues[4] + b.eigenvalues[5]), 50);
  auto budget = error_split(f, b.eigenvalues, 5);
  EXPECT_LE(std::abs(f(0.0) - 1.0), budget.em() + 1e-15);
}

TEST(DesignLowpass, RejectsBadCutoff) {
  EXPECT_THROW(design_lowpass(0.0, 10), ValidationError);
  EXPECT_THROW(design_lowpass(2.0, 10), ValidationError);
  EXPECT_THROW(design_lowpass(-1.0, 10), ValidationError);
  EXPECT_THROW(design_lowpass(1.0, 0), ValidationError);
}

TEST(Complement, SumsToOne) {
  auto low = design_lowpass(0.6, 50);
  auto high = complement(low);
  EXPECT_EQ(high.kind, FilterKind::highpass);
  for (double x = 0.0; x <= 2.0; x += 0.001) EXPECT_NEAR(low(x) + high(x), 1.0, 1e-14);
  EXPECT_EQ(design_highpass(0.6, 50), high);
}

TEST(Complement, OperatorOutputsAddBackToInput) {
  Graph g = random_graph(100, 0.08, 4);
  LaplacianOp op(g);
  Matrix x = random_matrix(100, 3, 1);
  auto low = design_lowpass(0.9, 40);
  Matrix a = apply_filter(low, op, x);
  Matrix b = apply_filter(complement(low), op, x);
  for (std::size_t i = 0; i < x.values().size(); ++i) EXPECT_NEAR(a.values()[i] + b.values()[i], x.values()[i], 1e-12);
}

TEST(PositivityRidge, LiftsHighpassAboveZero) {
  auto high = design_highpass(0.5, 50);
  const double rho = positivity_ridge(high);
  EXPECT_GE(rho, 1e-8);
  for (int i = 0; i <= 4000; ++i) EXPECT_GE(high(2.0 * i / 4000.0) + rho, 0.0);
}

TEST(ApplyFilter, ConstantFilterIsIdentity) {
  Graph g = random_graph(50, 0.1, 2);
  LaplacianOp op(g);
  PolyFilter f;
  f.coeffs = {1.0};
  Matrix x = random_matrix(50, 4, 3);
  EXPECT_TRUE(apply_filter(f, op, x) == x);
}

TEST(ApplyFilter, MatchesSpectralOracle) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Graph g = random_graph(200, 0.04, seed);
    LaplacianOp op(g);
    auto b = dense_eig(op);
    for (Damping d : {Damping::none, Damping::jackson}) {
      auto f = design_lowpass(0.4 + 0.3 * seed, 60, d);
      Matrix x = random_matrix(200, 5, seed + 7);
      Matrix fast = apply_filter(f, op, x);
      Matrix exact = spectral_apply(b, [&](double l) { return f(l); }, x);
      EXPECT_LE(relative_error(fast, exact), 1e-10);
    }
  }
}

TEST(ApplyFilter, DenseOperatorDouble) {
  Graph g = random_graph(40, 0.2, 6);
  LaplacianOp op(g);
  DenseOperator dense{dense_laplacian(op)};
  auto f = design_lowpass(1.1, 25);
  Matrix x = random_matrix(40, 2, 8);
  EXPECT_LE(relative_error(apply_filter(f, dense, x), apply_filter(f, op, x)), 1e-13);
}

TEST(ApplyFilter, ExcludedEigenvectorIsDampedBelowErrorBudget) {
  Graph g = disjoint_cliques(6, 8);
  std::vector<Edge> extra;
  for (const auto& e : g.edges()) extra.push_back(e);
  for (std::size_t c = 0; c + 1 < 6; ++c) extra.push_back({c * 8, (c + 1) * 8, 0.2});
  Graph h = build_graph(48, extra);
  LaplacianOp op(h);
  auto b = dense_eig(op);
  const std::size_t k = 6;
  auto f = design_lowpass(b.eigenvalues[k - 1] + 0.25 * (b.eigenvalues[k] - b.eigenvalues[k - 1]), 50);
  auto budget = error_split(f, b.eigenvalues, k);
  Matrix u(48, 1);
  for (std::size_t i = 0; i < 48; ++i) u(i, 0) = b.eigenvectors(i, k + 5);
  EXPECT_LE(frobenius_norm(apply_filter(f, op, u)), budget.em() + 1e-12);
}

TEST(ApplyFilter, LinearAndSymmetric) {
  Graph g = random_graph(90, 0.07, 12);
  LaplacianOp op(g);
  auto f = design_lowpass(0.75, 50);
  Matrix x = random_matrix(90, 1, 1), y = random_matrix(90, 1, 2);
  Matrix comb(90, 1);
  for (std::size_t i = 0; i < 90; ++i) comb(i, 0) = 2.5 * x(i, 0) - 1.5 * y(i, 0);
  Matrix fx = apply_filter(f, op, x), fy = apply_filter(f, op, y), fc = apply_filter(f, op, comb);
  for (std::size_t i = 0; i < 90; ++i) EXPECT_NEAR(fc(i, 0), 2.5 * fx(i, 0) - 1.5 * fy(i, 0), 1e-10);
  EXPECT_NEAR(dot(fx.values(), y.values()), dot(x.values(), fy.values()), 1e-10);
}

TEST(ApplyFilter, RowMismatchThrows) {
  Graph g = path(5);
  LaplacianOp op(g);
  EXPECT_THROW(apply_filter(design_lowpass(1.0, 5), op, Matrix(4, 1)), ValidationError);
}

TEST(ErrorSplit, IdealResponseHasNoError) {
  std::vector<double> spectrum{0.0, 0.1, 0.2, 0.9, 1.3, 2.0};
  auto ideal = [](double l) { return l <= 0.5 ? 1.0 : 0.0; };
  auto b = error_split(ideal, spectrum, 3);
  EXPECT_EQ(b.e1, 0.0);
  EXPECT_EQ(b.e2, 0.0);
}

TEST(ErrorSplit, HigherOrderReducesError) {
  SbmConfig c;
  c.num_nodes = 500;
  c.k = 10;
  c.avg_degree = 16;
  c.epsilon = 0.02;
  c.seed = 1;
  auto sbm = sbm_generate(c);
  auto b = dense_eig(LaplacianOp(sbm.graph));
  const double cut = 0.5 * (b.eigenvalues[9] + b.eigenvalues[10]);
  auto lo = error_split(design_lowpass(cut, 10), b.eigenvalues, 10);
  auto hi = error_split(design_lowpass(cut, 100), b.eigenvalues, 10);
  EXPECT_LT(hi.em(), lo.em());
}

TEST(ResolutionBound, IdealFilterHasFullSlack) {
  auto c = check_resolution_bound(ErrorBudget{0.0, 0.0}, 0.1, 0.5, 0.5);
  EXPECT_TRUE(c.split_ok);
  EXPECT_TRUE(c.em_ok);
  EXPECT_DOUBLE_EQ(c.em_slack(), 0.5 / 2.5);
  EXPECT_DOUBLE_EQ(c.split_slack(), 0.5 / 2.5);
}

TEST(ResolutionBound, DeltaOneGivesOneThird) {
  auto c = check_resolution_bound(ErrorBudget{0.01, 0.02}, 0.2, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(c.rhs, 1.0 / 3.0);
  EXPECT_NEAR(c.em_lhs, std::sqrt(2.0) * 0.02 / 0.2, 1e-15);
  EXPECT_NEAR(c.split_lhs, std::sqrt(0.0003) + std::sqrt(2.0) * 0.02 / 0.2, 1e-15);
}

TEST(ResolutionBound, RejectsNonPositiveCoherence) {
  EXPECT_THROW(check_resolution_bound(ErrorBudget{}, 0.0, 0.5, 0.5), NumericError);
  EXPECT_THROW(check_resolution_bound(ErrorBudget{}, 0.1, 2.0, 0.5), ValidationError);
}

TEST(FilterJson, RoundTrip) {
  auto f = design_highpass(0.42, 17, Damping::jackson);
  EXPECT_EQ(filter_from_json(to_json(f)), f);
  const auto path = std::filesystem::temp_directory_path() / "csc_filter_roundtrip.json";
  save_filter(f, path.string());
  EXPECT_EQ(load_filter(path.string()), f);
  std::filesystem::remove(path);
  auto bad = to_json(f);
  bad["coefficients"] = std::vector<double>{1.0};
  EXPECT_THROW(filter_from_json(bad), ValidationError);
}
