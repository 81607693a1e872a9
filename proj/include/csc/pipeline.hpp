#pragma once

// End-to-end compressive spectral clustering and the exact baseline, with
// per-stage timings and counters.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "csc/cluster_result.hpp"
#include "csc/error.hpp"
#include "csc/features.hpp"
#include "csc/graph.hpp"
#include "csc/kmeans.hpp"
#include "csc/poly_filter.hpp"
#include "csc/rng.hpp"
#include "csc/sampling_interp.hpp"
#include "csc/spectral_oracle.hpp"
#include "csc/spectrum_probe.hpp"
#include "json.hpp"

namespace csc {

/// ceil(2 k ln k), at least k.
inline std::size_t default_num_samples(std::size_t k) {
  const double kk = static_cast<double>(k);
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * kk * std::log(kk)));
  return std::max(n, k);
}

/// ceil(4 ln n), at least 1.
inline std::size_t default_num_signals(std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(4.0 * std::log(static_cast<double>(n)))));
}

struct CscParams {
  std::size_t k = 2;
  std::size_t n = 0;  // 0: ceil(2 k ln k)
  std::size_t d = 0;  // 0: ceil(4 ln n)
  std::size_t p = 50;
  double gamma = 1e-3;
  std::uint64_t seed = 0;
  std::optional<double> lambda_k;  // skips the estimation when set

  Damping damping = Damping::jackson;
  SignalDistribution distribution = SignalDistribution::gaussian;

  std::size_t probe_order = 50;
  std::size_t probe_signals = 0;  // 0: 2 ceil(ln N)
  std::size_t probe_max_steps = 20;
  bool probe_refine = false;

  std::size_t kmeans_replicates = 20;
  std::size_t kmeans_max_iters = 100;
  double kmeans_tol = 1e-6;
  Seeding kmeans_seeding = Seeding::kmeanspp;

  double solver_tol = 1e-6;
  std::size_t solver_max_iters = 1000;
  bool preconditioner = true;

  std::size_t resolved_n() const { return n == 0 ? default_num_samples(k) : n; }
  std::size_t resolved_d() const { return d == 0 ? default_num_signals(resolved_n()) : d; }

  void validate(std::size_t num_nodes) const {
    if (k < 2) throw ValidationError("k must be at least 2");
    if (k >= num_nodes) throw ValidationError("k must be smaller than the number of nodes");
    const std::size_t nn = resolved_n();
    if (nn < k) throw ValidationError("n must be at least k");
    if (nn > num_nodes) throw ValidationError("n = " + std::to_string(nn) + " exceeds the number of nodes");
    if (resolved_d() < 1) throw ValidationError("d must be at least 1");
    if (p < 1 || probe_order < 1) throw ValidationError("filter order must be at least 1");
    if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
    if (lambda_k && !(*lambda_k > 0.0 && *lambda_k < 2.0)) throw ValidationError("lambda_k must lie in (0, 2)");
    if (kmeans_replicates < 1) throw ValidationError("kmeans replicates must be at least 1");
  }
};

namespace detail {

class StageClock {
 public:
  explicit StageClock(Diagnostics& d) : diag_(d), start_(now()), last_(start_) {}
  void mark(const std::string& stage) {
    const auto t = now();
    diag_.timings.push_back({stage, seconds(last_, t)});
    last_ = t;
  }
  void finish() { diag_.total_seconds = seconds(start_, now()); }

 private:
  using clock = std::chrono::steady_clock;
  static clock::time_point now() { return clock::now(); }
  static double seconds(clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
  }
  Diagnostics& diag_;
  clock::time_point start_, last_;
};

}  // namespace detail

inline KmeansConfig kmeans_config(const CscParams& p, std::uint64_t seed) {
  KmeansConfig c;
  c.k = p.k;
  c.replicates = p.kmeans_replicates;
  c.max_iters = p.kmeans_max_iters;
  c.tol = p.kmeans_tol;
  c.seeding = p.kmeans_seeding;
  c.seed = seed;
  return c;
}

/// Compressive spectral clustering of the graph behind `op`.
inline ClusterResult run_csc(const LaplacianOp& op, const CscParams& params) {
  const Graph& g = op.graph();
  const std::size_t num_nodes = op.size();
  params.validate(num_nodes);
  const std::size_t k = params.k;
  const std::size_t n = params.resolved_n();
  const std::size_t d = params.resolved_d();

  ClusterResult res;
  Diagnostics& diag = res.diagnostics;
  detail::StageClock clock(diag);
  diag.method = "csc";
  diag.num_nodes = num_nodes;
  diag.num_edges = g.num_edges();
  diag.num_components = connected_components(g);
  diag.k = k;
  diag.n = n;
  diag.d = d;
  diag.p = params.p;
  diag.gamma = params.gamma;
  diag.isolated_nodes = g.isolated_nodes();
  if (diag.num_components > 1)
    diag.warnings.push_back("graph has " + std::to_string(diag.num_components) + " connected components");
  if (!diag.isolated_nodes.empty())
    diag.warnings.push_back(std::to_string(diag.isolated_nodes.size()) + " isolated node(s) excluded from sampling");

  // 1. cutoff
  double lambda_k = 0.0;
  if (params.lambda_k) {
    lambda_k = *params.lambda_k;
    diag.lambda_k_overridden = true;
  } else {
    ProbeConfig pc;
    pc.order = params.probe_order;
    pc.num_signals = params.probe_signals;
    pc.max_steps = params.probe_max_steps;
    pc.refine = params.probe_refine;
    pc.damping = params.damping;
    Rng rng = make_rng(params.seed, "lambda-probe");
    const LambdaKEstimate est = estimate_lambda_k(op, k, rng, pc);
    lambda_k = est.lambda_k_hat;
    diag.lambda_probes = est.iterations;
    diag.lambda_k_fallback = est.fallback;
    diag.laplacian_applications += est.iterations * est.num_signals * pc.order;
    if (est.fallback)
      diag.warnings.push_back("eigencount never matched k; using the final bracket midpoint");
  }
  diag.lambda_k_hat = lambda_k;
  clock.mark("lambda_estimation");

  // 2-4. features
  const PolyFilter lowpass = design_lowpass(lambda_k, params.p, params.damping);
  const RandomSignals signals = generate_signals(num_nodes, d, params.distribution, derive_seed(params.seed, "signals"));
  FeatureMatrix features = build_features(op, lowpass, signals);
  diag.laplacian_applications += d * params.p;
  diag.zero_norm_rows = features.zero_rows;
  for (auto& w : features.warnings) diag.warnings.push_back(w);
  clock.mark("features");

  // 5. sampling over nodes that carry a usable feature
  std::vector<char> excluded(num_nodes, 0);
  for (std::size_t i : diag.isolated_nodes) excluded[i] = 1;
  for (std::size_t i : features.zero_rows) excluded[i] = 1;
  std::vector<std::size_t> eligible;
  eligible.reserve(num_nodes);
  for (std::size_t i = 0; i < num_nodes; ++i)
    if (!excluded[i]) eligible.push_back(i);
  if (eligible.size() < n)
    throw NumericError("only " + std::to_string(eligible.size()) + " nodes are eligible for sampling, need " +
                       std::to_string(n));
  const SamplingSet sampling = draw_sampling(num_nodes, std::move(eligible), n, derive_seed(params.seed, "sampling"));
  const Matrix reduced = sampling.restrict_rows(features.rows);
  clock.mark("sampling");

  // 6. k-means on the reduced features
  const Labeling lab = kmeans(reduced, kmeans_config(params, derive_seed(params.seed, "kmeans")));
  diag.kmeans_iterations = lab.iterations_run;
  diag.kmeans_inertia = lab.inertia;
  if (lab.empty_clusters > 0)
    throw NumericError("k-means left " + std::to_string(lab.empty_clusters) + " empty cluster(s) after repair");
  if (lab.empty_repairs > 0)
    diag.warnings.push_back("k-means repaired " + std::to_string(lab.empty_repairs) + " empty cluster(s)");
  clock.mark("kmeans");

  // 7. interpolation and assignment
  InterpolationConfig ic;
  ic.gamma = params.gamma;
  ic.solver_tol = params.solver_tol;
  ic.max_iters = params.solver_max_iters;
  ic.highpass = complement(lowpass);
  ic.preconditioner = params.preconditioner;
  const Matrix cr = labels_to_indicators(lab.labels, k);
  InterpolationResult interp = interpolate(op, ic, sampling, cr);
  diag.ridge = interp.ridge;
  diag.solver_iterations = interp.iterations;
  diag.solver_residuals = interp.residuals;
  diag.solver_converged = interp.converged;
  diag.laplacian_applications += interp.filter_applications * params.p;
  if (!diag.converged())
    diag.warnings.push_back("interpolation solver did not reach the requested tolerance for every class");
  clock.mark("interpolation");

  Assignment a = assign(interp.x);
  res.labels = std::move(a.labels);
  res.indicators = std::move(interp.x);
  if (!a.tied_nodes.empty())
    diag.warnings.push_back(std::to_string(a.tied_nodes.size()) + " node(s) had tied cluster scores");
  clock.mark("assignment");
  clock.finish();
  return res;
}

/// Exact spectral clustering with the same k-means settings as run_csc.
inline ClusterResult run_sc_baseline(const LaplacianOp& op, const CscParams& params, EigOptions eig = {}) {
  if (params.k < 1 || params.k > op.size()) throw ValidationError("k must lie in [1, N]");
  Diagnostics timing;
  detail::StageClock clock(timing);
  eig.num_vectors = params.k;
  const EigenBasis basis = dense_eig(op, eig);
  clock.mark("eigendecomposition");
  ClusterResult res = spectral_clustering(basis, op.graph(), kmeans_config(params, derive_seed(params.seed, "kmeans")));
  clock.mark("kmeans");
  clock.finish();
  res.diagnostics.timings = std::move(timing.timings);
  res.diagnostics.total_seconds = timing.total_seconds;
  return res;
}

inline CscParams params_from_json(const nlohmann::json& j, CscParams base = {}) {
  static const std::set<std::string> known{
      "k", "n", "d", "p", "gamma", "seed", "lambda_k", "damping", "distribution", "probe_order", "probe_signals",
      "probe_max_steps", "probe_refine", "kmeans_replicates", "kmeans_max_iters", "kmeans_tol", "kmeans_seeding",
      "solver_tol", "solver_max_iters", "preconditioner"};
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ValidationError("unknown config key '" + key + "'");
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("k", base.k);
    get("n", base.n);
    get("d", base.d);
    get("p", base.p);
    get("gamma", base.gamma);
    get("seed", base.seed);
    if (j.contains("lambda_k") && !j.at("lambda_k").is_null()) base.lambda_k = j.at("lambda_k").get<double>();
    if (j.contains("damping")) base.damping = parse_damping(j.at("damping").get<std::string>());
    if (j.contains("distribution")) base.distribution = parse_distribution(j.at("distribution").get<std::string>());
    get("probe_order", base.probe_order);
    get("probe_signals", base.probe_signals);
    get("probe_max_steps", base.probe_max_steps);
    get("probe_refine", base.probe_refine);
    get("kmeans_replicates", base.kmeans_replicates);
    get("kmeans_max_iters", base.kmeans_max_iters);
    get("kmeans_tol", base.kmeans_tol);
    if (j.contains("kmeans_seeding")) {
      const auto s = j.at("kmeans_seeding").get<std::string>();
      if (s == "kmeanspp") base.kmeans_seeding = Seeding::kmeanspp;
      else if (s == "random") base.kmeans_seeding = Seeding::random;
      else throw ValidationError("unknown kmeans_seeding '" + s + "'");
    }
    get("solver_tol", base.solver_tol);
    get("solver_max_iters", base.solver_max_iters);
    get("preconditioner", base.preconditioner);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return base;
}

inline CscParams load_params(const std::string& path, CscParams base = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("config JSON: ") + e.what());
  }
  return params_from_json(j, base);
}

}  // namespace csc
