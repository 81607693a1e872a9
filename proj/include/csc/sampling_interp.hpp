#pragma once

// Uniform node sampling, regularized interpolation of the sampled cluster
// indicators back to the whole graph, and the final hard assignment.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "csc/error.hpp"
#include "csc/matrix.hpp"
#include "csc/poly_filter.hpp"
#include "csc/rng.hpp"

namespace csc {

/// Sampled node ids in increasing order; row r of M selects node indices[r].
struct SamplingSet {
  std::size_t num_nodes = 0;
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }

  /// M x: the sampled entries of x.
  std::vector<double> restrict(std::span<const double> x) const {
    std::vector<double> out(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) out[r] = x[indices[r]];
    return out;
  }

  /// M^T y: zero except on sampled nodes.
  std::vector<double> extend(std::span<const double> y) const {
    std::vector<double> out(num_nodes, 0.0);
    for (std::size_t r = 0; r < indices.size(); ++r) out[indices[r]] = y[r];
    return out;
  }

  /// Rows of a node-indexed matrix at the sampled nodes.
  Matrix restrict_rows(const Matrix& x) const {
    Matrix out(indices.size(), x.cols());
    for (std::size_t r = 0; r < indices.size(); ++r)
      std::copy_n(x.row(indices[r]).begin(), x.cols(), out.row(r).begin());
    return out;
  }
};

/// n nodes drawn uniformly without replacement from `eligible`.
inline SamplingSet draw_sampling(std::size_t num_nodes, std::vector<std::size_t> eligible, std::size_t n,
                                 std::uint64_t seed) {
  if (n < 1) throw ValidationError("draw_sampling: n must be at least 1");
  if (n > eligible.size())
    throw ValidationError("draw_sampling: cannot draw " + std::to_string(n) + " nodes out of " +
                          std::to_string(eligible.size()));
  Rng rng = make_rng(seed, "sampling");
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, eligible.size() - 1);
    std::swap(eligible[i], eligible[pick(rng)]);
  }
  eligible.resize(n);
  std::sort(eligible.begin(), eligible.end());
  return SamplingSet{num_nodes, std::move(eligible)};
}

inline SamplingSet draw_sampling(std::size_t num_nodes, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> all(num_nodes);
  std::iota(all.begin(), all.end(), 0);
  return draw_sampling(num_nodes, std::move(all), n, seed);
}

struct InterpolationConfig {
  double gamma = 1e-3;
  double solver_tol = 1e-6;
  std::size_t max_iters = 1000;
  PolyFilter highpass;
  /// Shift added to the high-pass response; negative means positivity_ridge(highpass).
  double ridge = -1.0;
  bool preconditioner = true;
};

struct InterpolationResult {
  Matrix x;  // N x k
  std::vector<std::size_t> iterations;
  std::vector<double> residuals;  // ||b - A x|| / ||b|| per class
  std::vector<bool> converged;
  double ridge = 0.0;
  /// Column applications of the high-pass filter (each costs `order` Laplacian products).
  std::size_t filter_applications = 0;
};

/// Solves (M^T M + gamma (g(L) + ridge I)) X = M^T C by batched conjugate
/// gradients, one independent recurrence per column of C (n x k). `apply_g`
/// maps an N x a block to g(L) times it. Non-converged columns return the
/// iterate with the smallest residual seen.
template <class ApplyG>
InterpolationResult interpolate_with(ApplyG&& apply_g, const InterpolationConfig& cfg, double ridge,
                                     const SamplingSet& m, const Matrix& reduced) {
  const std::size_t n_nodes = m.num_nodes;
  const std::size_t k = reduced.cols();
  if (reduced.rows() != m.size())
    throw ValidationError("interpolate: reduced indicators have " + std::to_string(reduced.rows()) +
                          " rows, sampling has " + std::to_string(m.size()));
  if (!(cfg.gamma > 0.0)) throw ValidationError("interpolate: gamma must be positive");
  if (!(cfg.solver_tol > 0.0)) throw ValidationError("interpolate: solver_tol must be positive");

  std::vector<char> sampled(n_nodes, 0);
  for (std::size_t idx : m.indices) sampled[idx] = 1;
  // Jacobi-style preconditioner; the diagonal of g(L) is replaced by 1.
  std::vector<double> inv_diag(n_nodes, 1.0);
  if (cfg.preconditioner)
    for (std::size_t i = 0; i < n_nodes; ++i)
      inv_diag[i] = 1.0 / ((sampled[i] ? 1.0 : 0.0) + cfg.gamma * (1.0 + ridge));

  InterpolationResult res;
  res.ridge = ridge;
  res.x = Matrix(n_nodes, k);
  res.iterations.assign(k, 0);
  res.residuals.assign(k, 0.0);
  res.converged.assign(k, false);

  // A Y for the columns listed in `cols`.
  auto apply_system = [&](const Matrix& y, const std::vector<std::size_t>& cols) {
    const std::size_t a = cols.size();
    Matrix block(n_nodes, a);
    for (std::size_t i = 0; i < n_nodes; ++i)
      for (std::size_t c = 0; c < a; ++c) block(i, c) = y(i, cols[c]);
    Matrix out = apply_g(block);
    res.filter_applications += a;
    for (std::size_t i = 0; i < n_nodes; ++i) {
      const double s = sampled[i] ? 1.0 : 0.0;
      for (std::size_t c = 0; c < a; ++c)
        out(i, c) = s * block(i, c) + cfg.gamma * (out(i, c) + ridge * block(i, c));
    }
    return out;
  };

  Matrix b(n_nodes, k);
  for (std::size_t r = 0; r < m.size(); ++r)
    std::copy_n(reduced.row(r).begin(), k, b.row(m.indices[r]).begin());
  std::vector<double> bnorm(k);
  for (std::size_t j = 0; j < k; ++j) bnorm[j] = norm2(b.column(j));

  Matrix r = b;  // x0 = 0
  Matrix z(n_nodes, k), p(n_nodes, k);
  Matrix best = res.x;
  std::vector<double> best_res(k, 1.0), rz(k, 0.0);
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < k; ++j) {
    if (bnorm[j] == 0.0) {
      res.converged[j] = true;
      res.residuals[j] = 0.0;
      continue;
    }
    active.push_back(j);
  }
  for (std::size_t i = 0; i < n_nodes; ++i)
    for (std::size_t j : active) {
      z(i, j) = inv_diag[i] * r(i, j);
      p(i, j) = z(i, j);
    }
  for (std::size_t j : active) {
    double s = 0.0;
    for (std::size_t i = 0; i < n_nodes; ++i) s += r(i, j) * z(i, j);
    rz[j] = s;
  }

  for (std::size_t it = 0; it < cfg.max_iters && !active.empty(); ++it) {
    Matrix ap = apply_system(p, active);
    std::vector<std::size_t> still;
    for (std::size_t c = 0; c < active.size(); ++c) {
      const std::size_t j = active[c];
      double pap = 0.0;
      for (std::size_t i = 0; i < n_nodes; ++i) pap += p(i, j) * ap(i, c);
      ++res.iterations[j];
      if (!(pap > 0.0) || !std::isfinite(pap)) continue;  // breakdown: keep best iterate
      const double alpha = rz[j] / pap;
      double rr = 0.0;
      for (std::size_t i = 0; i < n_nodes; ++i) {
        res.x(i, j) += alpha * p(i, j);
        r(i, j) -= alpha * ap(i, c);
        rr += r(i, j) * r(i, j);
      }
      const double rel = std::sqrt(rr) / bnorm[j];
      if (rel < best_res[j]) {
        best_res[j] = rel;
        for (std::size_t i = 0; i < n_nodes; ++i) best(i, j) = res.x(i, j);
      }
      if (rel <= cfg.solver_tol) {
        res.converged[j] = true;
        continue;
      }
      double rz_new = 0.0;
      for (std::size_t i = 0; i < n_nodes; ++i) {
        z(i, j) = inv_diag[i] * r(i, j);
        rz_new += r(i, j) * z(i, j);
      }
      const double beta = rz_new / rz[j];
      rz[j] = rz_new;
      for (std::size_t i = 0; i < n_nodes; ++i) p(i, j) = z(i, j) + beta * p(i, j);
      still.push_back(j);
    }
    active = std::move(still);
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (bnorm[j] == 0.0) continue;
    if (!res.converged[j])
      for (std::size_t i = 0; i < n_nodes; ++i) res.x(i, j) = best(i, j);
    res.residuals[j] = best_res[j];
  }
  return res;
}

template <ShiftedOperator Op>
InterpolationResult interpolate(const Op& op, const InterpolationConfig& cfg, const SamplingSet& m,
                                const Matrix& reduced) {
  if (m.num_nodes != op.size()) throw ValidationError("interpolate: sampling and operator sizes differ");
  if (cfg.highpass.coeffs.empty()) throw ValidationError("interpolate: no high-pass filter configured");
  const double ridge = cfg.ridge >= 0.0 ? cfg.ridge : positivity_ridge(cfg.highpass);
  return interpolate_with([&](const Matrix& x) { return apply_filter(cfg.highpass, op, x); }, cfg, ridge, m,
                          reduced);
}

template <ShiftedOperator Op>
std::vector<double> interpolate(const Op& op, const InterpolationConfig& cfg, const SamplingSet& m,
                                std::span<const double> c_r) {
  Matrix reduced(c_r.size(), 1);
  std::copy(c_r.begin(), c_r.end(), reduced.values().begin());
  auto res = interpolate(op, cfg, m, reduced);
  return res.x.column(0);
}

struct Assignment {
  std::vector<std::size_t> labels;
  /// Nodes whose maximum was shared by several clusters (or all zero).
  std::vector<std::size_t> tied_nodes;
};

/// Node i goes to the j maximizing c_j(i) / ||c_j||; ties to the lowest j.
inline Assignment assign(const Matrix& indicators) {
  const std::size_t n = indicators.rows();
  const std::size_t k = indicators.cols();
  if (k == 0) throw ValidationError("assign: no indicator vectors");
  std::vector<double> inv_norm(k, 0.0);
  bool any = false;
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += indicators(i, j) * indicators(i, j);
    if (s > 0.0) {
      inv_norm[j] = 1.0 / std::sqrt(s);
      any = true;
    }
  }
  if (!any) throw ValidationError("assign: every indicator vector is zero");
  Assignment a;
  a.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = indicators.row(i);
    std::size_t best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    bool all_zero = true;
    for (std::size_t j = 0; j < k; ++j) {
      if (row[j] != 0.0) all_zero = false;
      const double v = inv_norm[j] > 0.0 ? row[j] * inv_norm[j] : -std::numeric_limits<double>::infinity();
      if (v > best_v) {
        best_v = v;
        best = j;
      }
    }
    bool tie = all_zero;
    if (all_zero) {
      best = 0;
    } else {
      for (std::size_t j = best + 1; j < k; ++j)
        if (inv_norm[j] > 0.0 && row[j] * inv_norm[j] == best_v) tie = true;
    }
    a.labels[i] = best;
    if (tie) a.tied_nodes.push_back(i);
  }
  return a;
}

}  // namespace csc
