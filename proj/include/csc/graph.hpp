#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "csc/error.hpp"
#include "csc/matrix.hpp"

namespace csc {

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  double weight = 1.0;
};

struct BuildOptions {
  /// Throw on i == i entries instead of dropping them.
  bool reject_self_loops = false;
};

/// Undirected weighted graph in compressed row storage. Both directions of
/// every edge are stored; column indices are strictly increasing per row and
/// the diagonal is empty.
class Graph {
 public:
  Graph() = default;

  std::size_t num_nodes() const noexcept { return degrees_.size(); }
  /// Number of undirected edges.
  std::size_t num_edges() const noexcept { return cols_.size() / 2; }
  /// Number of stored (directed) entries, i.e. 2 * num_edges().
  std::size_t nnz() const noexcept { return cols_.size(); }

  std::span<const std::size_t> row_offsets() const noexcept { return offsets_; }
  std::span<const std::size_t> col_indices() const noexcept { return cols_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> degrees() const noexcept { return degrees_; }

  std::span<const std::size_t> neighbors(std::size_t i) const noexcept {
    return std::span<const std::size_t>(cols_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }
  std::span<const double> neighbor_weights(std::size_t i) const noexcept {
    return std::span<const double>(weights_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }

  double total_weight() const noexcept {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0) / 2.0;
  }

  std::vector<std::size_t> isolated_nodes() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < degrees_.size(); ++i)
      if (degrees_[i] == 0.0) out.push_back(i);
    return out;
  }

  /// Self-loop entries discarded during construction.
  std::size_t dropped_self_loops() const noexcept { return dropped_self_loops_; }

  /// Undirected edge list with src < dst, in CSR order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for (std::size_t i = 0; i < num_nodes(); ++i)
      for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e)
        if (cols_[e] > i) out.push_back({i, cols_[e], weights_[e]});
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.offsets_ == b.offsets_ && a.cols_ == b.cols_ && a.weights_ == b.weights_ &&
           a.degrees_ == b.degrees_;
  }

  friend Graph build_graph(std::size_t, std::span<const Edge>, BuildOptions);

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> weights_;
  std::vector<double> degrees_;
  std::size_t dropped_self_loops_ = 0;
};

/// Builds the canonical symmetric graph from an edge list.
///
/// Entries repeated in the same direction are summed. When both directions of
/// a pair appear, the undirected weight is max(w_ij, w_ji); when only one does,
/// it is used as is. Zero-weight pairs are not stored.
inline Graph build_graph(std::size_t num_nodes, std::span<const Edge> edges,
                         BuildOptions options = {}) {
  struct Directed {
    std::size_t lo, hi;
    bool forward;  // src < dst
    double w;
  };
  std::vector<Directed> entries;
  entries.reserve(edges.size());
  Graph g;
  for (const Edge& e : edges) {
    if (e.src >= num_nodes || e.dst >= num_nodes)
      throw ValidationError("edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) +
                            ") out of range for " + std::to_string(num_nodes) + " nodes");
    if (!std::isfinite(e.weight) || e.weight < 0.0)
      throw ValidationError("edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) +
                            ") has invalid weight " + std::to_string(e.weight));
    if (e.src == e.dst) {
      if (options.reject_self_loops)
        throw ValidationError("self-loop on node " + std::to_string(e.src));
      ++g.dropped_self_loops_;
      continue;
    }
    const bool fwd = e.src < e.dst;
    entries.push_back({std::min(e.src, e.dst), std::max(e.src, e.dst), fwd, e.weight});
  }
  std::sort(entries.begin(), entries.end(), [](const Directed& a, const Directed& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    if (a.hi != b.hi) return a.hi < b.hi;
    return a.forward > b.forward;
  });

  // Merge per unordered pair.
  std::vector<Edge> undirected;
  undirected.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    double fwd = 0.0, bwd = 0.0;
    bool has_fwd = false, has_bwd = false;
    while (j < entries.size() && entries[j].lo == entries[i].lo && entries[j].hi == entries[i].hi) {
      if (entries[j].forward) {
        fwd += entries[j].w;
        has_fwd = true;
      } else {
        bwd += entries[j].w;
        has_bwd = true;
      }
      ++j;
    }
    const double w = (has_fwd && has_bwd) ? std::max(fwd, bwd) : (has_fwd ? fwd : bwd);
    if (w > 0.0) undirected.push_back({entries[i].lo, entries[i].hi, w});
    i = j;
  }

  std::vector<std::size_t> counts(num_nodes + 1, 0);
  for (const Edge& e : undirected) {
    ++counts[e.src + 1];
    ++counts[e.dst + 1];
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  g.offsets_ = counts;
  g.cols_.assign(2 * undirected.size(), 0);
  g.weights_.assign(2 * undirected.size(), 0.0);
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  // `undirected` is sorted by (lo, hi): filling the lo rows in order and the hi
  // rows in order of lo keeps every row's columns increasing.
  for (const Edge& e : undirected) {
    g.cols_[cursor[e.dst]] = e.src;
    g.weights_[cursor[e.dst]++] = e.weight;
  }
  for (const Edge& e : undirected) {
    g.cols_[cursor[e.src]] = e.dst;
    g.weights_[cursor[e.src]++] = e.weight;
  }
  // Rows now hold [lower neighbours ascending][upper neighbours ascending].
  g.degrees_.assign(num_nodes, 0.0);
  for (std::size_t i = 0; i < num_nodes; ++i) {
    double d = 0.0;
    for (std::size_t e = g.offsets_[i]; e < g.offsets_[i + 1]; ++e) d += g.weights_[e];
    g.degrees_[i] = d;
  }
  return g;
}

inline Graph build_graph(std::size_t num_nodes, const std::vector<Edge>& edges,
                         BuildOptions options = {}) {
  return build_graph(num_nodes, std::span<const Edge>(edges), options);
}

/// Number of connected components (isolated nodes count as their own).
inline std::size_t connected_components(const Graph& g, std::vector<std::size_t>* component = nullptr) {
  const std::size_t n = g.num_nodes();
  std::vector<std::size_t> comp(n, n);
  std::vector<std::size_t> stack;
  std::size_t count = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] != n) continue;
    comp[s] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : g.neighbors(u))
        if (comp[v] == n) {
          comp[v] = count;
          stack.push_back(v);
        }
    }
    ++count;
  }
  if (component) *component = std::move(comp);
  return count;
}

/// Normalized Laplacian L = I - D^{-1/2} W D^{-1/2} as a matrix-free operator.
///
/// Zero-degree nodes get a zero entry in D^{-1/2}, so L acts as the identity
/// on their coordinate. The operator keeps a pointer to the graph, which must
/// outlive it.
class LaplacianOp {
 public:
  explicit LaplacianOp(const Graph& g) : graph_(&g) {
    const auto deg = g.degrees();
    inv_sqrt_degree_.resize(deg.size());
    for (std::size_t i = 0; i < deg.size(); ++i)
      inv_sqrt_degree_[i] = deg[i] > 0.0 ? 1.0 / std::sqrt(deg[i]) : 0.0;
    const auto off = g.row_offsets();
    const auto cols = g.col_indices();
    const auto w = g.weights();
    normalized_.resize(w.size());
    for (std::size_t i = 0; i < deg.size(); ++i)
      for (std::size_t e = off[i]; e < off[i + 1]; ++e)
        normalized_[e] = w[e] * inv_sqrt_degree_[i] * inv_sqrt_degree_[cols[e]];
  }

  const Graph& graph() const noexcept { return *graph_; }
  std::size_t size() const noexcept { return inv_sqrt_degree_.size(); }
  std::span<const double> inv_sqrt_degree() const noexcept { return inv_sqrt_degree_; }
  bool zero_degree(std::size_t i) const noexcept { return inv_sqrt_degree_[i] == 0.0; }

  /// y = L x
  void apply(std::span<const double> x, std::span<double> y) const {
    check_length(x.size(), y.size());
    const auto off = graph_->row_offsets();
    const auto cols = graph_->col_indices();
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t e = off[i]; e < off[i + 1]; ++e) acc += normalized_[e] * x[cols[e]];
      y[i] = x[i] - acc;
    }
  }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> y(x.size());
    apply(x, y);
    return y;
  }

  /// Y = (L - I) X = -D^{-1/2} W D^{-1/2} X, column block at once. This is
  /// the shifted operator the Chebyshev recurrence on [0, 2] runs on.
  void apply_shifted(const Matrix& x, Matrix& y) const {
    check_block(x, y);
    const auto off = graph_->row_offsets();
    const auto cols = graph_->col_indices();
    const std::size_t n = size();
    const std::size_t d = x.cols();
    const double* xd = x.data();
    double* yd = y.data();
    const std::size_t nnz = cols.size();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      double* yi = yd + i * d;
      for (std::size_t c = 0; c < d; ++c) yi[c] = 0.0;
      for (std::size_t e = off[i]; e < off[i + 1]; ++e) {
        // Neighbour rows are scattered once the block outgrows the cache;
        // fetch a few edges ahead so the gathers overlap.
        if (e + kPrefetch < nnz) {
          const double* ahead = xd + cols[e + kPrefetch] * d;
          for (std::size_t c = 0; c < d; c += 8) __builtin_prefetch(ahead + c);
        }
        const double w = -normalized_[e];
        const double* xj = xd + cols[e] * d;
        for (std::size_t c = 0; c < d; ++c) yi[c] += w * xj[c];
      }
    }
  }

  /// Y = L X
  void apply_block(const Matrix& x, Matrix& y) const {
    apply_shifted(x, y);
    auto yv = y.values();
    auto xv = x.values();
    for (std::size_t i = 0; i < yv.size(); ++i) yv[i] += xv[i];
  }

 private:
  void check_length(std::size_t nx, std::size_t ny) const {
    if (nx != size() || ny != size())
      throw ValidationError("Laplacian apply: expected vectors of length " +
                            std::to_string(size()));
  }
  void check_block(const Matrix& x, Matrix& y) const {
    if (x.rows() != size()) throw ValidationError("Laplacian apply: row count mismatch");
    if (!y.same_shape(x)) y = Matrix(x.rows(), x.cols());
  }

  static constexpr std::size_t kPrefetch = 16;

  const Graph* graph_;
  std::vector<double> inv_sqrt_degree_;
  std::vector<double> normalized_;
};

/// Returns L x.
inline std::vector<double> apply_laplacian(const LaplacianOp& op, std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) throw ValidationError("apply_laplacian: non-finite input");
  if (x.size() != op.size())
    throw ValidationError("apply_laplacian: length " + std::to_string(x.size()) +
                          " does not match " + std::to_string(op.size()) + " nodes");
  return op.apply(x);
}

/// Dense copy of L; only for small graphs.
inline Matrix dense_laplacian(const LaplacianOp& op) {
  const Graph& g = op.graph();
  const std::size_t n = op.size();
  Matrix l = Matrix::identity(n);
  const auto dinv = op.inv_sqrt_degree();
  for (std::size_t i = 0; i < n; ++i) {
    auto nb = g.neighbors(i);
    auto w = g.neighbor_weights(i);
    for (std::size_t e = 0; e < nb.size(); ++e) l(i, nb[e]) -= w[e] * dinv[i] * dinv[nb[e]];
  }
  return l;
}

}  // namespace csc
