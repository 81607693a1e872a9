#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

#include "csc/error.hpp"
#include "csc/graph.hpp"

namespace csc {

namespace detail {

inline std::vector<std::size_t> compact_labels(std::span<const std::size_t> labels, std::size_t& count) {
  std::unordered_map<std::size_t, std::size_t> ids;
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = ids.try_emplace(labels[i], ids.size());
    out[i] = it->second;
  }
  count = ids.size();
  return out;
}

inline double choose2(double x) { return 0.5 * x * (x - 1.0); }

}  // namespace detail

/// Adjusted Rand index (Hubert and Arabie). Returns 1 when both partitions
/// are trivial in the same way and the index is undefined.
inline double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw ValidationError("adjusted_rand_index: label vectors differ in length");
  const std::size_t n = a.size();
  std::size_t ka = 0, kb = 0;
  const auto ca = detail::compact_labels(a, ka);
  const auto cb = detail::compact_labels(b, kb);
  std::vector<double> table(ka * kb, 0.0), rows(ka, 0.0), cols(kb, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    table[ca[i] * kb + cb[i]] += 1.0;
    rows[ca[i]] += 1.0;
    cols[cb[i]] += 1.0;
  }
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (double v : table) index += detail::choose2(v);
  for (double v : rows) sa += detail::choose2(v);
  for (double v : cols) sb += detail::choose2(v);
  const double total = detail::choose2(static_cast<double>(n));
  if (total == 0.0) return 1.0;
  const double expected = sa * sb / total;
  const double max_index = 0.5 * (sa + sb);
  const double denom = max_index - expected;
  if (denom == 0.0) return 1.0;
  return (index - expected) / denom;
}

/// Newman modularity sum_c [in_c / 2m - (tot_c / 2m)^2].
inline double modularity(const Graph& g, std::span<const std::size_t> labels) {
  if (labels.size() != g.num_nodes()) throw ValidationError("modularity: need one label per node");
  const double two_m = 2.0 * g.total_weight();
  if (!(two_m > 0.0)) throw ValidationError("modularity: graph has no edges");
  std::size_t kc = 0;
  const auto c = detail::compact_labels(labels, kc);
  std::vector<double> in(kc, 0.0), tot(kc, 0.0);
  const auto deg = g.degrees();
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    tot[c[i]] += deg[i];
    auto nb = g.neighbors(i);
    auto w = g.neighbor_weights(i);
    for (std::size_t e = 0; e < nb.size(); ++e)
      if (c[nb[e]] == c[i]) in[c[i]] += w[e];
  }
  double q = 0.0;
  for (std::size_t j = 0; j < kc; ++j) q += in[j] / two_m - (tot[j] / two_m) * (tot[j] / two_m);
  return q;
}

}  // namespace csc
