#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "csc/matrix.hpp"
#include "json.hpp"

namespace csc {

struct StageTime {
  std::string stage;
  double seconds = 0.0;
};

/// Per-run record of what the clustering did. Timings are kept apart from the
/// rest so that results can be compared byte for byte across runs.
struct Diagnostics {
  std::string method;
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
  std::size_t num_components = 0;
  std::size_t k = 0;

  // Compressive pipeline parameters (zero for the exact baseline).
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t p = 0;
  double gamma = 0.0;

  std::optional<double> lambda_k_hat;
  bool lambda_k_overridden = false;
  bool lambda_k_fallback = false;
  std::size_t lambda_probes = 0;
  double ridge = 0.0;

  std::vector<std::size_t> solver_iterations;
  std::vector<double> solver_residuals;
  std::vector<bool> solver_converged;

  std::size_t kmeans_iterations = 0;
  double kmeans_inertia = 0.0;

  /// Single-column Laplacian applications, summed over every stage.
  std::size_t laplacian_applications = 0;

  std::vector<std::size_t> isolated_nodes;
  std::vector<std::size_t> zero_norm_rows;
  std::vector<std::string> warnings;

  std::vector<StageTime> timings;
  double total_seconds = 0.0;

  bool converged() const {
    for (bool c : solver_converged)
      if (!c) return false;
    return true;
  }
};

/// Output of a clustering run: soft indicators (N x k, column j is the
/// indicator of cluster j; empty for the exact baseline), hard labels and
/// diagnostics.
struct ClusterResult {
  Matrix indicators;
  std::vector<std::size_t> labels;
  Diagnostics diagnostics;
};

inline nlohmann::json to_json(const Diagnostics& d, bool include_timings = false) {
  nlohmann::json j;
  j["method"] = d.method;
  j["num_nodes"] = d.num_nodes;
  j["num_edges"] = d.num_edges;
  j["num_components"] = d.num_components;
  j["k"] = d.k;
  if (d.method == "csc") {
    j["n"] = d.n;
    j["d"] = d.d;
    j["p"] = d.p;
    j["gamma"] = d.gamma;
    j["lambda_k_hat"] = d.lambda_k_hat ? nlohmann::json(*d.lambda_k_hat) : nlohmann::json();
    j["lambda_k_overridden"] = d.lambda_k_overridden;
    j["lambda_k_fallback"] = d.lambda_k_fallback;
    j["lambda_probes"] = d.lambda_probes;
    j["ridge"] = d.ridge;
    j["solver_iterations"] = d.solver_iterations;
    j["solver_residuals"] = d.solver_residuals;
    j["solver_converged"] = d.solver_converged;
    j["laplacian_applications"] = d.laplacian_applications;
  }
  j["kmeans_iterations"] = d.kmeans_iterations;
  j["kmeans_inertia"] = d.kmeans_inertia;
  j["isolated_nodes"] = d.isolated_nodes;
  j["zero_norm_rows"] = d.zero_norm_rows;
  j["warnings"] = d.warnings;
  if (include_timings) {
    nlohmann::json t = nlohmann::json::object();
    for (const auto& s : d.timings) t[s.stage] = s.seconds;
    j["timings"] = t;
    j["total_seconds"] = d.total_seconds;
  }
  return j;
}

inline nlohmann::json to_json(const ClusterResult& r, bool include_timings = false) {
  nlohmann::json j;
  j["labels"] = r.labels;
  j["diagnostics"] = to_json(r.diagnostics, include_timings);
  return j;
}

}  // namespace csc
