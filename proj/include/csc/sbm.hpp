#pragma once

// Stochastic block model graphs with a target average degree.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "csc/error.hpp"
#include "csc/graph.hpp"
#include "csc/rng.hpp"

namespace csc {

struct SbmConfig {
  std::size_t num_nodes = 1000;
  std::size_t k = 20;
  /// Explicit community sizes; empty means k communities of (nearly) equal size.
  std::vector<std::size_t> sizes;
  double avg_degree = 16.0;
  double epsilon = 0.0;  // q2 / q1
  std::uint64_t seed = 0;
};

struct SbmGraph {
  Graph graph;
  std::vector<std::size_t> labels;
  std::vector<std::size_t> sizes;
  double q1 = 0.0;
  double q2 = 0.0;
};

/// Detectability threshold (s - sqrt s) / (s + sqrt s (k - 1)).
inline double critical_epsilon(double s, std::size_t k) {
  if (!(s > 1.0)) throw ValidationError("critical_epsilon: average degree must exceed 1");
  const double r = std::sqrt(s);
  return (s - r) / (s + r * (static_cast<double>(k) - 1.0));
}

/// Community sizes: explicit list, or N/k with the remainder spread over the first communities.
inline std::vector<std::size_t> community_sizes(const SbmConfig& cfg) {
  if (!cfg.sizes.empty()) {
    std::size_t total = 0;
    for (std::size_t s : cfg.sizes) {
      if (s == 0) throw ValidationError("sbm: community sizes must be positive");
      total += s;
    }
    if (total != cfg.num_nodes)
      throw ValidationError("sbm: community sizes sum to " + std::to_string(total) + ", expected " +
                            std::to_string(cfg.num_nodes));
    return cfg.sizes;
  }
  if (cfg.k < 1 || cfg.k > cfg.num_nodes) throw ValidationError("sbm: k must lie in [1, N]");
  std::vector<std::size_t> sizes(cfg.k, cfg.num_nodes / cfg.k);
  for (std::size_t c = 0; c < cfg.num_nodes % cfg.k; ++c) ++sizes[c];
  return sizes;
}

/// q1 = s k / (N (1 + eps (k - 1))), with k the number of communities.
inline double intra_probability(std::size_t num_nodes, std::size_t k, double s, double epsilon) {
  return s * static_cast<double>(k) /
         (static_cast<double>(num_nodes) * (1.0 + epsilon * (static_cast<double>(k) - 1.0)));
}

namespace detail {

/// Calls emit(t) for every t in [0, total) kept with probability q, by
/// geometric skips between successes.
template <class Emit>
void bernoulli_indices(std::uint64_t total, double q, Rng& rng, Emit&& emit) {
  if (q <= 0.0 || total == 0) return;
  if (q >= 1.0) {
    for (std::uint64_t t = 0; t < total; ++t) emit(t);
    return;
  }
  const double log_q = std::log1p(-q);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uint64_t t = 0;
  bool first = true;
  while (true) {
    const double u = 1.0 - unif(rng);  // (0, 1]
    const double skip = std::floor(std::log(u) / log_q);
    if (skip >= static_cast<double>(total)) return;
    const auto step = static_cast<std::uint64_t>(skip) + (first ? 0 : 1);
    if (total - t <= step) return;
    t += step;
    first = false;
    emit(t);
  }
}

}  // namespace detail

inline SbmGraph sbm_generate(const SbmConfig& cfg) {
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0)) throw ValidationError("sbm: epsilon must lie in [0, 1]");
  if (!(cfg.avg_degree > 0.0)) throw ValidationError("sbm: average degree must be positive");
  SbmGraph out;
  out.sizes = community_sizes(cfg);
  const std::size_t k = out.sizes.size();
  out.q1 = intra_probability(cfg.num_nodes, k, cfg.avg_degree, cfg.epsilon);
  out.q2 = cfg.epsilon * out.q1;
  if (out.q1 > 1.0)
    throw ValidationError("sbm: intra-community probability " + std::to_string(out.q1) +
                          " exceeds 1; lower the average degree or use larger communities");

  std::vector<std::size_t> start(k + 1, 0);
  for (std::size_t c = 0; c < k; ++c) start[c + 1] = start[c] + out.sizes[c];
  out.labels.resize(cfg.num_nodes);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t i = start[c]; i < start[c + 1]; ++i) out.labels[i] = c;

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(cfg.avg_degree * static_cast<double>(cfg.num_nodes) * 0.55) + 16);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      Rng rng = make_rng(cfg.seed, "sbm-block", static_cast<std::uint64_t>(a) * k + b);
      const std::uint64_t na = out.sizes[a];
      const std::uint64_t nb = out.sizes[b];
      if (a == b) {
        // Lower triangle of the block, row-major: pair t <-> (v, w), w < v.
        std::uint64_t v = 1, base = 0;
        detail::bernoulli_indices(na * (na - 1) / 2, out.q1, rng, [&](std::uint64_t t) {
          while (t - base >= v) {
            base += v;
            ++v;
          }
          edges.push_back({start[a] + static_cast<std::size_t>(v), start[a] + static_cast<std::size_t>(t - base), 1.0});
        });
      } else {
        detail::bernoulli_indices(na * nb, out.q2, rng, [&](std::uint64_t t) {
          edges.push_back({start[a] + static_cast<std::size_t>(t / nb), start[b] + static_cast<std::size_t>(t % nb), 1.0});
        });
      }
    }
  }
  out.graph = build_graph(cfg.num_nodes, edges);
  return out;
}

}  // namespace csc
