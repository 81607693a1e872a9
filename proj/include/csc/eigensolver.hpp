#pragma once

// Dense symmetric eigensolver: Householder tridiagonalization followed by the
// implicit QL algorithm (all eigenpairs) or by QL for eigenvalues plus inverse
// iteration (leading eigenvectors only).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "csc/error.hpp"
#include "csc/matrix.hpp"

namespace csc {

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] = T(i, i+1); off[n-1] = 0
};

/// Householder reflectors that reduce a symmetric matrix to tridiagonal form:
/// reflector r acts on coordinates r+1..n-1 as I - beta_r v v^T, with v stored
/// in row r of `vectors` from column r+1 on.
struct HouseholderReduction {
  Tridiagonal t;
  Matrix vectors;
  std::vector<double> beta;

  /// z <- Q z, turning an eigenvector of T into one of the original matrix.
  void back_transform(std::span<double> z) const {
    const std::size_t n = z.size();
    for (std::size_t r = beta.size(); r-- > 0;) {
      if (beta[r] == 0.0) continue;
      auto v = vectors.row(r).subspan(r + 1);
      auto tail = z.subspan(r + 1, n - r - 1);
      const double s = beta[r] * dot(v, tail);
      axpy(-s, v, tail);
    }
  }
};

namespace detail {

inline void check_deadline(const Deadline& deadline) {
  if (deadline && std::chrono::steady_clock::now() > *deadline)
    throw DeadlineExceeded("dense eigensolver exceeded its deadline");
}

}  // namespace detail

/// Reduces the symmetric matrix `a` (consumed) to tridiagonal form.
inline HouseholderReduction tridiagonalize(Matrix a, const Deadline& deadline = std::nullopt) {
  const std::size_t n = a.rows();
  HouseholderReduction h;
  h.t.diag.assign(n, 0.0);
  h.t.off.assign(n, 0.0);
  h.beta.assign(n > 2 ? n - 2 : 0, 0.0);
  std::vector<double> p(n), w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    if ((k & 31) == 0) detail::check_deadline(deadline);
    h.t.diag[k] = a(k, k);
    const std::size_t m = n - k - 1;
    auto x = a.row(k).subspan(k + 1, m);
    double tail = 0.0;
    for (std::size_t i = 1; i < m; ++i) tail += x[i] * x[i];
    if (tail == 0.0) {
      h.t.off[k] = x[0];
      h.beta[k] = 0.0;
      continue;
    }
    const double xnorm = std::sqrt(x[0] * x[0] + tail);
    const double alpha = x[0] >= 0.0 ? -xnorm : xnorm;
    x[0] -= alpha;  // x now holds v
    const double vtv = x[0] * x[0] + tail;
    const double beta = 2.0 / vtv;
    h.t.off[k] = alpha;
    h.beta[k] = beta;
    // p = beta * A22 v
    for (std::size_t i = 0; i < m; ++i) p[i] = beta * dot(a.row(k + 1 + i).subspan(k + 1, m), x);
    const double kk = 0.5 * beta * dot(std::span<const double>(p.data(), m), x);
    for (std::size_t i = 0; i < m; ++i) w[i] = p[i] - kk * x[i];
    // A22 -= v w^T + w v^T
    for (std::size_t i = 0; i < m; ++i) {
      auto ai = a.row(k + 1 + i).subspan(k + 1, m);
      const double vi = x[i];
      const double wi = w[i];
      for (std::size_t j = 0; j < m; ++j) ai[j] -= vi * w[j] + wi * x[j];
    }
  }
  if (n >= 2) {
    h.t.diag[n - 2] = a(n - 2, n - 2);
    h.t.off[n - 2] = a(n - 2, n - 1);
  }
  if (n >= 1) h.t.diag[n - 1] = a(n - 1, n - 1);
  h.vectors = std::move(a);
  return h;
}

/// Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal matrix.
/// On return `t.diag` holds the eigenvalues in ascending order. When `z` is
/// given (n x n, usually the identity), its rows are rotated along, so row i
/// ends up as the eigenvector of eigenvalue i.
inline void tridiagonal_ql(Tridiagonal& t, Matrix* z = nullptr,
                           const Deadline& deadline = std::nullopt) {
  auto& d = t.diag;
  auto& e = t.off;
  const std::size_t n = d.size();
  if (n == 0) return;
  e[n - 1] = 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const std::size_t max_sweeps = 60 * n + 60;
  std::size_t sweeps = 0;
  double f = 0.0;
  double tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;
    if (m > l) {
      do {
        if (++sweeps > max_sweeps) throw NumericError("tridiagonal QL failed to converge");
        if (z && (sweeps & 15) == 0) detail::check_deadline(deadline);
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;
        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          if (z) {
            auto zi = z->row(i);
            auto zi1 = z->row(i + 1);
            for (std::size_t q = 0; q < zi.size(); ++q) {
              const double hz = zi1[q];
              zi1[q] = s * zi[q] + c * hz;
              zi[q] = c * zi[q] - s * hz;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
  // Sort ascending, permuting eigenvector rows along.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = d[order[i]];
  d = std::move(sorted);
  if (z) {
    Matrix zs(n, z->cols());
    for (std::size_t i = 0; i < n; ++i)
      std::copy_n(z->row(order[i]).begin(), z->cols(), zs.row(i).begin());
    *z = std::move(zs);
  }
}

/// Eigenvectors of a tridiagonal matrix for the given (ascending) eigenvalues
/// by inverse iteration, reorthogonalized within clusters of close
/// eigenvalues. Row i of the result is the vector for `values[i]`.
inline Matrix tridiagonal_inverse_iteration(const Tridiagonal& t, std::span<const double> values) {
  const std::size_t n = t.diag.size();
  const std::size_t m = values.size();
  Matrix out(m, n);
  if (n == 0) return out;
  double tnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? std::abs(t.off[i - 1]) : 0.0;
    const double right = i + 1 < n ? std::abs(t.off[i]) : 0.0;
    tnorm = std::max(tnorm, std::abs(t.diag[i]) + left + right);
  }
  tnorm = std::max(tnorm, std::numeric_limits<double>::min());
  const double tiny = std::numeric_limits<double>::epsilon() * tnorm;
  const double cluster_gap = 1e-3 * tnorm;

  std::vector<double> dd(n), du1(n), du2(n), mult(n);
  std::vector<char> swapped(n);
  std::vector<double> x(n);
  std::uint64_t lcg = 0x2545F4914F6CDD1DULL;
  auto next_unit = [&lcg] {
    lcg = lcg * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(lcg >> 11) * 0x1.0p-53 - 0.5;
  };

  std::size_t cluster_start = 0;
  for (std::size_t s = 0; s < m; ++s) {
    const double lambda = values[s];
    if (s > 0 && values[s] - values[s - 1] > cluster_gap) cluster_start = s;
    // LU with partial pivoting of T - lambda I.
    for (std::size_t i = 0; i < n; ++i) {
      dd[i] = t.diag[i] - lambda;
      du1[i] = i + 1 < n ? t.off[i] : 0.0;
      du2[i] = 0.0;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double sub = t.off[i];
      if (std::abs(dd[i]) >= std::abs(sub)) {
        if (dd[i] == 0.0) dd[i] = tiny;
        mult[i] = sub / dd[i];
        swapped[i] = 0;
        dd[i + 1] -= mult[i] * du1[i];
      } else {
        mult[i] = dd[i] / sub;
        swapped[i] = 1;
        const double old_du1 = du1[i];
        const double next_dd = dd[i + 1];
        const double next_du1 = du1[i + 1];
        dd[i] = sub;
        du1[i] = next_dd;
        du2[i] = next_du1;
        dd[i + 1] = old_du1 - mult[i] * next_dd;
        du1[i + 1] = -mult[i] * next_du1;
      }
    }
    if (dd[n - 1] == 0.0) dd[n - 1] = tiny;

    for (std::size_t i = 0; i < n; ++i) x[i] = next_unit();
    for (int iter = 0; iter < 4; ++iter) {
      // Forward: apply the row operations.
      for (std::size_t i = 0; i + 1 < n; ++i) {
        if (swapped[i]) {
          const double xi = x[i];
          x[i] = x[i + 1];
          x[i + 1] = xi - mult[i] * x[i];
        } else {
          x[i + 1] -= mult[i] * x[i];
        }
      }
      // Back substitution with the upper factor (two superdiagonals).
      for (std::size_t i = n; i-- > 0;) {
        double v = x[i];
        if (i + 1 < n) v -= du1[i] * x[i + 1];
        if (i + 2 < n) v -= du2[i] * x[i + 2];
        x[i] = v / dd[i];
      }
      // Reorthogonalize against earlier members of the cluster (twice is enough).
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t q = cluster_start; q < s; ++q) axpy(-dot(out.row(q), x), out.row(q), x);
      double nx = norm2(x);
      if (nx == 0.0 || !std::isfinite(nx)) {
        for (std::size_t i = 0; i < n; ++i) x[i] = next_unit();
        nx = norm2(x);
      }
      for (double& v : x) v /= nx;
    }
    std::copy(x.begin(), x.end(), out.row(s).begin());
  }
  return out;
}

struct SymmetricEigen {
  std::vector<double> values;  // ascending, all n
  Matrix vectors;              // n x m, column j = eigenvector of values[j]
};

/// Eigen-decomposition of a dense symmetric matrix. Computes every eigenvalue
/// and the eigenvectors of the `num_vectors` smallest ones.
inline SymmetricEigen symmetric_eigen(Matrix a, std::size_t num_vectors,
                                      const Deadline& deadline = std::nullopt) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw ValidationError("symmetric_eigen: matrix must be square");
  num_vectors = std::min(num_vectors, n);
  HouseholderReduction h = tridiagonalize(std::move(a), deadline);
  SymmetricEigen out;
  Matrix rows;  // eigenvectors of T, one per row
  Tridiagonal t = h.t;
  if (4 * num_vectors >= n) {
    rows = Matrix::identity(n);
    tridiagonal_ql(t, &rows, deadline);
  } else {
    tridiagonal_ql(t, nullptr, deadline);
    rows = tridiagonal_inverse_iteration(h.t, std::span<const double>(t.diag).first(num_vectors));
  }
  out.values = t.diag;
  out.vectors = Matrix(n, num_vectors);
  for (std::size_t j = 0; j < num_vectors; ++j) {
    detail::check_deadline(deadline);
    auto z = rows.row(j);
    h.back_transform(z);
    // Deterministic sign: largest-magnitude entry positive.
    std::size_t arg = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(z[i]) > std::abs(z[arg]) + 1e-12) arg = i;
    const double sign = z[arg] < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = sign * z[i];
  }
  return out;
}

}  // namespace csc
