#pragma once

// Exact eigendecomposition of the normalized Laplacian for small graphs, and
// the baseline spectral clustering built on it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "csc/cluster_result.hpp"
#include "csc/eigensolver.hpp"
#include "csc/error.hpp"
#include "csc/graph.hpp"
#include "csc/kmeans.hpp"
#include "csc/matrix.hpp"

namespace csc {

struct EigOptions {
  std::size_t max_nodes = 5000;
  /// Number of leading eigenvectors to compute; 0 means all of them.
  std::size_t num_vectors = 0;
  Deadline deadline;
};

/// eigenvalues ascending (all N); eigenvectors is N x m with column j paired
/// with eigenvalues[j].
struct EigenBasis {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;

  std::size_t size() const { return eigenvalues.size(); }
  /// First k columns of U, as an N x k matrix.
  Matrix leading(std::size_t k) const {
    if (k > eigenvectors.cols()) throw ValidationError("EigenBasis: only " + std::to_string(eigenvectors.cols()) + " eigenvectors available");
    Matrix u(eigenvectors.rows(), k);
    for (std::size_t i = 0; i < u.rows(); ++i)
      std::copy_n(eigenvectors.row(i).begin(), k, u.row(i).begin());
    return u;
  }
};

struct CoherenceProfile {
  std::vector<double> local;  // v_k(i)
  double global = 0.0;        // nu_k
};

/// Eigendecomposition of an explicit symmetric matrix.
inline EigenBasis dense_eig(const Matrix& symmetric, const EigOptions& opts = {}) {
  const std::size_t n = symmetric.rows();
  if (n > opts.max_nodes)
    throw CapacityError("dense eigendecomposition capped at " + std::to_string(opts.max_nodes) +
                        " nodes (graph has " + std::to_string(n) + "); use the compressive pipeline instead");
  const std::size_t m = opts.num_vectors == 0 ? n : std::min(opts.num_vectors, n);
  SymmetricEigen e = symmetric_eigen(symmetric, m, opts.deadline);
  return EigenBasis{std::move(e.values), std::move(e.vectors)};
}

inline EigenBasis dense_eig(const LaplacianOp& op, const EigOptions& opts = {}) {
  if (op.size() > opts.max_nodes)
    throw CapacityError("dense eigendecomposition capped at " + std::to_string(opts.max_nodes) +
                        " nodes (graph has " + std::to_string(op.size()) + "); use the compressive pipeline instead");
  return dense_eig(dense_laplacian(op), opts);
}

inline CoherenceProfile coherence(const EigenBasis& basis, std::size_t k) {
  const std::size_t n = basis.eigenvectors.rows();
  if (k < 1 || k > basis.eigenvectors.cols()) throw ValidationError("coherence: k out of range");
  CoherenceProfile c;
  c.local.resize(n);
  double mx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = basis.eigenvectors.row(i).first(k);
    c.local[i] = norm2(row);
    mx = std::max(mx, c.local[i]);
  }
  c.global = std::sqrt(static_cast<double>(n)) * mx;
  return c;
}

/// Rows of U_k scaled to unit length. Throws when a row is zero.
inline Matrix normalized_rows(const Matrix& uk) {
  Matrix y = uk;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    auto row = y.row(i);
    const double nr = norm2(row);
    if (!(nr > 1e-14))
      throw NumericError("spectral embedding has a zero row at node " + std::to_string(i) +
                         "; the node carries no energy in the first k eigenvectors");
    for (double& v : row) v /= nr;
  }
  return y;
}

/// True when lambda_k and lambda_{k+1} coincide up to round-off.
inline bool eigenvalue_tie(const std::vector<double>& values, std::size_t k) {
  if (k == 0 || k >= values.size()) return false;
  return std::abs(values[k] - values[k - 1]) <= 1e-9;
}

/// Spectral clustering from an already computed basis.
inline ClusterResult spectral_clustering(const EigenBasis& basis, const Graph& g, const KmeansConfig& cfg) {
  const std::size_t k = cfg.k;
  const std::size_t n = basis.size();
  if (k < 1 || k > n) throw ValidationError("spectral_clustering: k must lie in [1, N]");
  ClusterResult r;
  auto& d = r.diagnostics;
  d.method = "sc";
  d.num_nodes = g.num_nodes();
  d.num_edges = g.num_edges();
  d.num_components = connected_components(g);
  d.k = k;
  d.isolated_nodes = g.isolated_nodes();
  if (!d.isolated_nodes.empty())
    throw ValidationError("spectral_clustering: graph has " + std::to_string(d.isolated_nodes.size()) +
                          " isolated node(s), first is " + std::to_string(d.isolated_nodes.front()));
  if (eigenvalue_tie(basis.eigenvalues, k))
    d.warnings.push_back("lambda_k equals lambda_{k+1}; the first k eigenvectors span an arbitrary part of the eigenspace");
  Matrix y = normalized_rows(basis.leading(k));
  Labeling lab = kmeans(y, cfg);
  r.labels = std::move(lab.labels);
  d.kmeans_iterations = lab.iterations_run;
  d.kmeans_inertia = lab.inertia;
  if (lab.empty_repairs > 0)
    d.warnings.push_back("k-means repaired " + std::to_string(lab.empty_repairs) + " empty cluster(s)");
  return r;
}

inline ClusterResult spectral_clustering(const LaplacianOp& op, const KmeansConfig& cfg, EigOptions opts = {}) {
  if (cfg.k < 1 || cfg.k > op.size()) throw ValidationError("spectral_clustering: k must lie in [1, N]");
  opts.num_vectors = cfg.k;
  EigenBasis basis = dense_eig(op, opts);
  return spectral_clustering(basis, op.graph(), cfg);
}

}  // namespace csc
