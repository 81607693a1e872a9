// csc: generate SBM graphs, cluster edge lists, run benchmark sweeps.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "csc/csc.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kNumeric = 3, kIo = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int report(const std::string& type, const std::string& message, int code) {
  nlohmann::json j{{"error", {{"type", type}, {"message", message}}}, {"exit_code", code}};
  std::cerr << j.dump() << '\n';
  return code;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("csc");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("CSC_LOG")) {
    const auto lvl = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only honor names it really knows.
    if (lvl != spdlog::level::off || std::string(env) == "off") spdlog::set_level(lvl);
  }
}

/// Refuses to clobber files without --force and checks the directory exists.
void check_output(const std::string& path, bool force) {
  if (path.empty()) throw UsageError("missing output path");
  if (fs::exists(path) && !force) throw UsageError(path + " exists; pass --force to overwrite");
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) throw csc::IoError("directory " + parent.string() + " does not exist");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw csc::IoError("cannot write " + path);
  out << text;
  if (!out) throw csc::IoError("failed writing " + path);
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      sizes.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw UsageError("--sizes: '" + item + "' is not a positive integer");
    }
  }
  return sizes;
}

struct SbmGenArgs {
  std::size_t nodes = 1000;
  std::size_t k = 20;
  double s = 16.0;
  std::optional<double> eps;
  std::optional<double> eps_frac;
  std::string sizes;
  std::uint64_t seed = 0;
  std::string output;
  std::string labels;
  bool force = false;
};

int cmd_sbm_gen(const SbmGenArgs& a) {
  if (a.eps && a.eps_frac) throw UsageError("give either --eps or --eps-frac, not both");
  const std::string labels = a.labels.empty() ? a.output + ".labels.csv" : a.labels;
  check_output(a.output, a.force);
  check_output(labels, a.force);
  csc::SbmConfig cfg;
  cfg.num_nodes = a.nodes;
  cfg.k = a.k;
  cfg.avg_degree = a.s;
  if (!a.sizes.empty()) {
    cfg.sizes = parse_sizes(a.sizes);
    cfg.k = cfg.sizes.size();
  }
  cfg.epsilon = a.eps ? *a.eps : (a.eps_frac ? *a.eps_frac : 0.25) * csc::critical_epsilon(a.s, cfg.k);
  cfg.seed = a.seed;
  const csc::SbmGraph g = csc::sbm_generate(cfg);
  spdlog::info("generated N={} k={} edges={} epsilon={} q1={} q2={}", g.graph.num_nodes(), g.sizes.size(),
               g.graph.num_edges(), cfg.epsilon, g.q1, g.q2);
  csc::write_edge_list(g.graph, a.output);
  csc::write_labels_csv(g.labels, labels);
  return kOk;
}

struct ClusterArgs {
  std::string input;
  std::string output;
  std::string diagnostics;
  std::string config;
  std::string truth;
  std::string method = "csc";
  std::string format = "csv";
  std::optional<std::size_t> k, n, d, p;
  std::optional<double> gamma, lambda_k;
  std::optional<std::uint64_t> seed;
  std::size_t eig_cap = 5000;
  bool timings = false;
  bool force = false;
};

int cmd_cluster(const ClusterArgs& a) {
  if (a.input.empty()) throw UsageError("missing --input");
  if (!fs::exists(a.input)) throw csc::IoError("cannot open " + a.input);
  check_output(a.output, a.force);
  const std::string diag_path = !a.diagnostics.empty() ? a.diagnostics
                                : a.format == "csv"      ? a.output + ".diagnostics.json"
                                                         : std::string();
  if (!diag_path.empty()) check_output(diag_path, a.force);

  csc::CscParams params;
  if (!a.config.empty()) params = csc::load_params(a.config);
  if (a.k) params.k = *a.k;
  if (a.n) params.n = *a.n;
  if (a.d) params.d = *a.d;
  if (a.p) params.p = params.probe_order = *a.p;
  if (a.gamma) params.gamma = *a.gamma;
  if (a.lambda_k) params.lambda_k = *a.lambda_k;
  if (a.seed) params.seed = *a.seed;

  const csc::Graph g = csc::read_edge_list(a.input);
  const csc::LaplacianOp op(g);
  spdlog::info("read N={} edges={}", g.num_nodes(), g.num_edges());
  csc::ClusterResult r;
  if (a.method == "sc") {
    csc::EigOptions eo;
    eo.max_nodes = a.eig_cap;
    r = csc::run_sc_baseline(op, params, eo);
  } else {
    r = csc::run_csc(op, params);
  }
  for (const auto& w : r.diagnostics.warnings) spdlog::warn("{}", w);

  nlohmann::json diag = csc::to_json(r.diagnostics, a.timings);
  if (!a.truth.empty()) {
    const auto truth = csc::read_labels_csv(a.truth);
    diag["ari"] = csc::adjusted_rand_index(r.labels, truth);
  }
  if (g.num_edges() > 0) diag["modularity"] = csc::modularity(g, r.labels);

  if (a.format == "json") {
    nlohmann::json out{{"labels", r.labels}, {"diagnostics", diag}};
    write_text(a.output, out.dump(2) + "\n");
  } else {
    csc::write_labels_csv(r.labels, a.output);
  }
  if (!diag_path.empty()) write_text(diag_path, diag.dump(2) + "\n");
  if (!r.diagnostics.converged()) {
    return report("not_converged", "interpolation solver did not reach the requested tolerance; outputs were written",
                  kNumeric);
  }
  return kOk;
}

struct BenchArgs {
  std::string spec;
  std::string output;
  bool resume = false;
  bool force = false;
};

int cmd_bench(const BenchArgs& a) {
  if (a.spec.empty()) throw UsageError("missing --spec");
  std::ifstream in(a.spec);
  if (!in) throw csc::IoError("cannot open " + a.spec);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw csc::ParseError(0, std::string("sweep spec: ") + e.what());
  }
  const csc::SweepSpec spec = csc::sweep_from_json(j);
  if (!a.resume) check_output(a.output, a.force);
  const auto summary = csc::run_sweep(spec, a.output, a.resume,
                                      [](const std::string& row) { spdlog::info("{}", row.substr(0, row.size() - 1)); });
  spdlog::info("runs={} skipped={} failed={}", summary.runs, summary.skipped, summary.failed);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Compressive spectral clustering of graphs"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);

  SbmGenArgs sg;
  auto* sbm = app.add_subcommand("sbm-gen", "Generate a stochastic block model graph and its ground-truth labels");
  sbm->footer(
      "Without --eps, epsilon = 0.25 * eps_c with eps_c = (s - sqrt s) / (s + sqrt s (k - 1)).\n"
      "q1 = s k / (N (1 + eps (k - 1))), q2 = eps q1.");
  sbm->add_option("--n", sg.nodes, "Number of nodes")->capture_default_str();
  sbm->add_option("--k", sg.k, "Number of communities")->capture_default_str();
  sbm->add_option("--s", sg.s, "Target average degree")->capture_default_str();
  sbm->add_option("--eps", sg.eps, "Ratio q2/q1 of inter- to intra-community edge probability");
  sbm->add_option("--eps-frac", sg.eps_frac,
                  "Epsilon as a fraction of the critical value (s - sqrt s)/(s + sqrt s (k - 1)); default 0.25");
  sbm->add_option("--sizes", sg.sizes, "Comma-separated community sizes (overrides --k)");
  sbm->add_option("--seed", sg.seed, "Random seed")->capture_default_str();
  sbm->add_option("--output", sg.output, "Edge list to write")->required();
  sbm->add_option("--labels", sg.labels, "Ground-truth labels CSV (default: <output>.labels.csv)");
  sbm->add_flag("--force", sg.force, "Overwrite existing files");

  ClusterArgs cl;
  auto* cluster = app.add_subcommand("cluster", "Cluster the nodes of an edge-list graph");
  cluster->footer(
      "Defaults follow the compressive algorithm: n = 2k log k, d = 4 log n, p = 50, gamma = 1e-3\n"
      "(natural log, rounded up). lambda_k is estimated by dichotomy on eigencounts unless --lambda-k is given.\n"
      "Exit codes: 0 success, 2 usage, 3 numeric failure or solver non-convergence, 4 I/O.");
  cluster->add_option("--input", cl.input, "Edge list: 'src dst [weight]' per line, # comments")->required();
  cluster->add_option("--output", cl.output, "Labels file (CSV node_id,label or JSON, see --format)")->required();
  cluster->add_option("--diagnostics", cl.diagnostics, "Diagnostics JSON (default with csv: <output>.diagnostics.json)");
  cluster->add_option("--config", cl.config, "JSON file with pipeline parameters; flags override it");
  cluster->add_option("--method", cl.method, "csc or sc (exact eigendecomposition)")
      ->check(CLI::IsMember({"csc", "sc"}))
      ->capture_default_str();
  cluster->add_option("--format", cl.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  cluster->add_option("--k", cl.k, "Number of clusters (default 2)");
  cluster->add_option("--n", cl.n, "Sampled nodes (default n = 2k log k)");
  cluster->add_option("--d", cl.d, "Random signals (default d = 4 log n)");
  cluster->add_option("--p", cl.p, "Chebyshev order of the filters (default p = 50)");
  cluster->add_option("--gamma", cl.gamma, "Interpolation regularization (default gamma = 1e-3)");
  cluster->add_option("--lambda-k", cl.lambda_k, "Use this cutoff instead of estimating lambda_k");
  cluster->add_option("--seed", cl.seed, "Random seed (default 0)");
  cluster->add_option("--truth", cl.truth, "Ground-truth labels CSV; adds the adjusted Rand index to diagnostics");
  cluster->add_option("--eig-cap", cl.eig_cap, "Largest graph --method sc accepts")->capture_default_str();
  cluster->add_flag("--timings", cl.timings, "Include wall-clock timings in diagnostics");
  cluster->add_flag("--force", cl.force, "Overwrite existing files");

  BenchArgs bn;
  auto* bench = app.add_subcommand("bench", "Run a parameter sweep on SBM graphs and write a CSV report");
  bench->footer(
      "Spec keys: num_nodes, k, sizes, avg_degree, epsilons or epsilon_fractions, methods, n, d, p, gamma,\n"
      "replicates, seed, params. n = 0 and d = 0 mean the defaults n = 2k log k, d = 4 log n;\n"
      "p defaults to p = 50 and gamma to gamma = 1e-3.");
  bench->add_option("--spec", bn.spec, "Sweep description (JSON)")->required();
  bench->add_option("--output", bn.output, "CSV report")->required();
  bench->add_flag("--resume", bn.resume, "Append to an existing report, skipping finished runs");
  bench->add_flag("--force", bn.force, "Overwrite an existing report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("usage", e.what(), kUsage);
  }

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    if (*sbm) return cmd_sbm_gen(sg);
    if (*cluster) return cmd_cluster(cl);
    if (*bench) return cmd_bench(bn);
  } catch (const UsageError& e) {
    return report("usage", e.what(), kUsage);
  } catch (const csc::ValidationError& e) {
    return report("validation", e.what(), kUsage);
  } catch (const csc::IoError& e) {
    return report("io", e.what(), kIo);
  } catch (const csc::ParseError& e) {
    return report("parse", e.what(), kIo);
  } catch (const csc::NumericError& e) {
    return report("numeric", e.what(), kNumeric);
  } catch (const std::exception& e) {
    return report("internal", e.what(), kNumeric);
  }
  return kUsage;
}
