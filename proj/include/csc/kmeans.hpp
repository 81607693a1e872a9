#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "csc/error.hpp"
#include "csc/matrix.hpp"
#include "csc/rng.hpp"

namespace csc {

enum class Seeding { kmeanspp, random };

struct KmeansConfig {
  std::size_t k = 2;
  std::size_t replicates = 20;
  std::size_t max_iters = 100;
  /// Stop when the relative inertia change between iterations falls below this.
  double tol = 1e-6;
  Seeding seeding = Seeding::kmeanspp;
  std::uint64_t seed = 0;
};

struct Labeling {
  std::vector<std::size_t> labels;
  Matrix centroids;
  double inertia = 0.0;
  std::size_t iterations_run = 0;
  std::size_t empty_repairs = 0;
  /// Inertia after each assignment step of the returned replicate.
  std::vector<double> inertia_trace;
  /// Number of clusters that ended with no member (only possible when the
  /// data has fewer than k distinct points).
  std::size_t empty_clusters = 0;
  std::size_t replicate = 0;
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

/// Nearest centroid, ties to the lowest index.
inline std::size_t nearest(std::span<const double> x, const Matrix& centroids, double& best) {
  std::size_t arg = 0;
  best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < centroids.rows(); ++j) {
    const double d = squared_distance(x, centroids.row(j));
    if (d < best) {
      best = d;
      arg = j;
    }
  }
  return arg;
}

inline Matrix seed_centroids(const Matrix& points, std::size_t k, Seeding seeding, Rng& rng) {
  const std::size_t q = points.rows();
  Matrix c(k, points.cols());
  if (seeding == Seeding::random) {
    std::vector<std::size_t> idx(q);
    for (std::size_t i = 0; i < q; ++i) idx[i] = i;
    for (std::size_t j = 0; j < k; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, q - 1);
      std::swap(idx[j], idx[pick(rng)]);
      std::copy_n(points.row(idx[j]).begin(), points.cols(), c.row(j).begin());
    }
    return c;
  }
  std::uniform_int_distribution<std::size_t> first(0, q - 1);
  std::copy_n(points.row(first(rng)).begin(), points.cols(), c.row(0).begin());
  std::vector<double> d2(q);
  for (std::size_t i = 0; i < q; ++i) d2[i] = squared_distance(points.row(i), c.row(0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t j = 1; j < k; ++j) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t chosen = q - 1;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < q; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          chosen = i;
          break;
        }
      }
      if (d2[chosen] == 0.0) {  // rounding at the tail
        for (std::size_t i = q; i-- > 0;)
          if (d2[i] > 0.0) {
            chosen = i;
            break;
          }
      }
    } else {
      chosen = first(rng);
    }
    std::copy_n(points.row(chosen).begin(), points.cols(), c.row(j).begin());
    for (std::size_t i = 0; i < q; ++i)
      d2[i] = std::min(d2[i], squared_distance(points.row(i), c.row(j)));
  }
  return c;
}

inline void recompute_centroids(const Matrix& points, std::span<const std::size_t> labels,
                                Matrix& centroids, std::vector<std::size_t>& counts) {
  const std::size_t k = centroids.rows();
  Matrix sums(k, points.cols());
  counts.assign(k, 0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    axpy(1.0, points.row(i), sums.row(labels[i]));
    ++counts[labels[i]];
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (counts[j] == 0) continue;  // keep the old centroid; repaired by the caller
    auto cj = centroids.row(j);
    auto sj = sums.row(j);
    for (std::size_t c = 0; c < cj.size(); ++c) cj[c] = sj[c] / static_cast<double>(counts[j]);
  }
}

inline double assign_all(const Matrix& points, const Matrix& centroids,
                         std::vector<std::size_t>& labels, std::vector<double>& dist2) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    labels[i] = nearest(points.row(i), centroids, dist2[i]);
    inertia += dist2[i];
  }
  return inertia;
}

}  // namespace detail

/// Lloyd iterations from the given initial centroids.
///
/// Empty clusters are reseeded at the point farthest from its current
/// centroid, so every cluster keeps at least one member whenever the data has
/// at least k distinct points.
inline Labeling lloyd(const Matrix& points, Matrix centroids, const KmeansConfig& cfg) {
  const std::size_t q = points.rows();
  const std::size_t k = centroids.rows();
  Labeling out;
  out.labels.assign(q, 0);
  std::vector<double> dist2(q);
  std::vector<std::size_t> counts;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < std::max<std::size_t>(cfg.max_iters, 1); ++it) {
    std::vector<std::size_t> before = out.labels;
    double inertia = detail::assign_all(points, centroids, out.labels, dist2);
    detail::recompute_centroids(points, out.labels, centroids, counts);
    // Repair empties: each takes the currently worst-served point.
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] != 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < q; ++i)
        if (counts[out.labels[i]] > 1 && dist2[i] > far_d) {
          far_d = dist2[i];
          far = i;
        }
      if (far_d <= 0.0) continue;  // nothing distinct left to hand over
      --counts[out.labels[far]];
      out.labels[far] = j;
      counts[j] = 1;
      inertia -= dist2[far];
      dist2[far] = 0.0;
      std::copy_n(points.row(far).begin(), points.cols(), centroids.row(j).begin());
      ++out.empty_repairs;
    }
    out.inertia_trace.push_back(inertia);
    out.iterations_run = it + 1;
    detail::recompute_centroids(points, out.labels, centroids, counts);
    const bool unchanged = it > 0 && before == out.labels;
    const bool small = it > 0 && std::abs(prev - inertia) <= cfg.tol * prev;
    prev = inertia;
    if (unchanged || small) break;
  }
  out.empty_clusters = 0;
  for (std::size_t c : counts)
    if (c == 0) ++out.empty_clusters;
  out.inertia = 0.0;
  for (std::size_t i = 0; i < q; ++i)
    out.inertia += detail::squared_distance(points.row(i), centroids.row(out.labels[i]));
  out.centroids = std::move(centroids);
  return out;
}

/// Best-inertia k-means over `cfg.replicates` independently seeded runs.
inline Labeling kmeans(const Matrix& points, const KmeansConfig& cfg) {
  if (cfg.k == 0) throw ValidationError("kmeans: k must be at least 1");
  if (cfg.replicates == 0) throw ValidationError("kmeans: replicates must be at least 1");
  if (points.rows() < cfg.k)
    throw ValidationError("kmeans: " + std::to_string(points.rows()) +
                          " points cannot form " + std::to_string(cfg.k) + " clusters");
  std::vector<Labeling> runs(cfg.replicates);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(cfg.replicates); ++r) {
    Rng rng = make_rng(cfg.seed, "kmeans-replicate", static_cast<std::uint64_t>(r));
    runs[r] = lloyd(points, detail::seed_centroids(points, cfg.k, cfg.seeding, rng), cfg);
    runs[r].replicate = static_cast<std::size_t>(r);
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].inertia < runs[best].inertia) best = r;
  return std::move(runs[best]);
}

/// One-hot reduced indicator vectors, as an n x k matrix (column j = c_j^r).
/// Clusters without members come back as zero columns and are listed in
/// `empty` when given.
inline Matrix labels_to_indicators(std::span<const std::size_t> labels, std::size_t k,
                                   std::vector<std::size_t>* empty = nullptr) {
  Matrix c(labels.size(), k);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= k) throw ValidationError("label out of range");
    c(i, labels[i]) = 1.0;
    ++count[labels[i]];
  }
  if (empty) {
    empty->clear();
    for (std::size_t j = 0; j < k; ++j)
      if (count[j] == 0) empty->push_back(j);
  }
  return c;
}

}  // namespace csc
