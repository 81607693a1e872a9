#pragma once

// Parameter sweeps over SBM graphs: one CSV row per (graph, method, params)
// run. Graph realizations are shared by every method and parameter setting
// at the same epsilon, so comparisons use common random numbers.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "csc/error.hpp"
#include "csc/graph_io.hpp"
#include "csc/metrics.hpp"
#include "csc/pipeline.hpp"
#include "csc/sbm.hpp"
#include "json.hpp"

namespace csc {

struct SweepSpec {
  std::size_t num_nodes = 1000;
  std::size_t k = 20;
  std::vector<std::size_t> sizes;
  double avg_degree = 16.0;
  std::vector<double> epsilons;
  /// Epsilons given as fractions of the critical value; used when `epsilons` is empty.
  std::vector<double> epsilon_fractions;
  std::vector<std::string> methods{"csc"};
  std::vector<std::size_t> n_values{0};
  std::vector<std::size_t> d_values{0};
  std::vector<std::size_t> p_values{50};
  std::vector<double> gamma_values{1e-3};
  std::size_t replicates = 20;
  std::uint64_t seed = 0;
  /// Other pipeline settings (k-means, solver, probe).
  CscParams base;
  std::size_t eig_max_nodes = 5000;

  std::vector<double> resolved_epsilons() const {
    if (!epsilons.empty()) return epsilons;
    std::vector<double> out;
    const double ec = critical_epsilon(avg_degree, sizes.empty() ? k : sizes.size());
    for (double f : epsilon_fractions) out.push_back(f * ec);
    return out;
  }
};

inline SweepSpec sweep_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known{"num_nodes", "k", "sizes", "avg_degree", "epsilons", "epsilon_fractions",
                                           "methods", "n", "d", "p", "gamma", "replicates", "seed", "params",
                                           "eig_max_nodes"};
  if (!j.is_object()) throw ValidationError("sweep spec must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ValidationError("unknown sweep key '" + key + "'");
  SweepSpec s;
  try {
    s.num_nodes = j.value("num_nodes", s.num_nodes);
    s.k = j.value("k", s.k);
    s.sizes = j.value("sizes", s.sizes);
    s.avg_degree = j.value("avg_degree", s.avg_degree);
    s.epsilons = j.value("epsilons", s.epsilons);
    s.epsilon_fractions = j.value("epsilon_fractions", s.epsilon_fractions);
    s.methods = j.value("methods", s.methods);
    s.n_values = j.value("n", s.n_values);
    s.d_values = j.value("d", s.d_values);
    s.p_values = j.value("p", s.p_values);
    s.gamma_values = j.value("gamma", s.gamma_values);
    s.replicates = j.value("replicates", s.replicates);
    s.seed = j.value("seed", s.seed);
    s.eig_max_nodes = j.value("eig_max_nodes", s.eig_max_nodes);
    if (j.contains("params")) s.base = params_from_json(j.at("params"));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("sweep spec: ") + e.what());
  }
  if (s.epsilons.empty() && s.epsilon_fractions.empty()) throw ValidationError("sweep spec: no epsilons given");
  for (const auto& m : s.methods)
    if (m != "csc" && m != "sc") throw ValidationError("sweep spec: unknown method '" + m + "'");
  if (s.replicates < 1) throw ValidationError("sweep spec: replicates must be at least 1");
  if (s.n_values.empty() || s.d_values.empty() || s.p_values.empty() || s.gamma_values.empty())
    throw ValidationError("sweep spec: parameter lists must not be empty");
  return s;
}

inline const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols{
      "method", "epsilon", "graph_rep", "n", "d", "p", "gamma", "num_nodes", "k", "avg_degree", "seed", "status",
      "ari", "modularity", "lambda_k_hat", "lambda_k_fallback", "solver_converged", "total_seconds", "stage_times",
      "error"};
  return cols;
}

namespace detail {

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

inline std::string run_key(const std::string& method, const std::string& eps, const std::string& rep,
                           const std::string& n, const std::string& d, const std::string& p, const std::string& gamma) {
  return method + '|' + eps + '|' + rep + '|' + n + '|' + d + '|' + p + '|' + gamma;
}

}  // namespace detail

/// Keys of runs already present in an existing report.
inline std::set<std::string> completed_runs(const std::string& path) {
  std::set<std::string> keys;
  std::ifstream in(path);
  if (!in) return keys;
  std::string line;
  if (!std::getline(in, line)) return keys;
  const auto header = detail::csv_split(line);
  if (header != sweep_columns()) throw ValidationError("cannot resume: " + path + " has a different header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::csv_split(line);
    if (f.size() != header.size()) continue;  // torn final line from an interrupted run
    keys.insert(detail::run_key(f[0], f[1], f[2], f[3], f[4], f[5], f[6]));
  }
  return keys;
}

struct SweepSummary {
  std::size_t runs = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
};

/// Runs the sweep and appends rows to `out_path`. With `resume`, runs whose
/// key is already in the file are skipped; otherwise the file is rewritten.
/// `progress` is called after every run with the row written.
inline SweepSummary run_sweep(const SweepSpec& spec, const std::string& out_path, bool resume,
                              const std::function<void(const std::string&)>& progress = {}) {
  using detail::format_double;
  std::set<std::string> done;
  const bool exists = std::filesystem::exists(out_path);
  // Drop a torn trailing line so appended rows start on a fresh line.
  if (resume && exists) {
    std::ifstream in(out_path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    if (!text.empty() && text.back() != '\n') {
      const auto cut = text.find_last_of('\n');
      text = cut == std::string::npos ? std::string() : text.substr(0, cut + 1);
      std::ofstream rewrite(out_path, std::ios::trunc);
      rewrite << text;
    }
    done = completed_runs(out_path);
  }
  const bool write_header = !(resume && exists && std::filesystem::file_size(out_path) > 0);
  std::ofstream out(out_path, resume ? std::ios::app : std::ios::trunc);
  if (!out) throw IoError("cannot write " + out_path);
  if (write_header) {
    const auto& cols = sweep_columns();
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << '\n';
  }

  struct Cell {
    std::string method;
    std::size_t n, d, p;
    double gamma;
  };
  std::vector<Cell> cells;
  for (const auto& m : spec.methods) {
    if (m == "sc") {
      cells.push_back({m, 0, 0, 0, 0.0});
      continue;
    }
    for (std::size_t n : spec.n_values)
      for (std::size_t d : spec.d_values)
        for (std::size_t p : spec.p_values)
          for (double g : spec.gamma_values) cells.push_back({m, n, d, p, g});
  }

  SweepSummary summary;
  const auto eps_list = spec.resolved_epsilons();
  for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
    const double eps = eps_list[ei];
    for (std::size_t rep = 0; rep < spec.replicates; ++rep) {
      std::vector<const Cell*> todo;
      for (const auto& c : cells) {
        const auto key = detail::run_key(c.method, format_double(eps), std::to_string(rep), std::to_string(c.n),
                                         std::to_string(c.d), std::to_string(c.p), format_double(c.gamma));
        if (done.count(key))
          ++summary.skipped;
        else
          todo.push_back(&c);
      }
      if (todo.empty()) continue;
      SbmConfig gc;
      gc.num_nodes = spec.num_nodes;
      gc.k = spec.k;
      gc.sizes = spec.sizes;
      gc.avg_degree = spec.avg_degree;
      gc.epsilon = eps;
      gc.seed = derive_seed(spec.seed, "sweep-graph", ei * 1000003ULL + rep);
      const SbmGraph sbm = sbm_generate(gc);
      const LaplacianOp op(sbm.graph);
      const std::uint64_t run_seed = derive_seed(spec.seed, "sweep-run", ei * 1000003ULL + rep);
      const std::size_t k = sbm.sizes.size();

      for (const Cell* c : todo) {
        CscParams params = spec.base;
        params.k = k;
        params.n = c->n;
        params.d = c->d;
        params.p = c->p;
        params.probe_order = c->method == "csc" ? (c->p ? c->p : spec.base.probe_order) : params.probe_order;
        params.gamma = c->method == "csc" ? c->gamma : params.gamma;
        params.seed = run_seed;
        std::string status = "ok", error, ari, mod, lam, fallback, conv, total, stages;
        try {
          ClusterResult r;
          if (c->method == "sc") {
            EigOptions eo;
            eo.max_nodes = spec.eig_max_nodes;
            r = run_sc_baseline(op, params, eo);
          } else {
            r = run_csc(op, params);
          }
          const auto& dg = r.diagnostics;
          ari = format_double(adjusted_rand_index(r.labels, sbm.labels));
          mod = format_double(modularity(sbm.graph, r.labels));
          if (dg.lambda_k_hat) lam = format_double(*dg.lambda_k_hat);
          if (c->method == "csc") {
            fallback = dg.lambda_k_fallback ? "1" : "0";
            conv = dg.converged() ? "1" : "0";
            if (!dg.converged()) status = "not_converged";
          }
          total = format_double(dg.total_seconds);
          for (std::size_t s = 0; s < dg.timings.size(); ++s)
            stages += (s ? ";" : "") + dg.timings[s].stage + "=" + format_double(dg.timings[s].seconds);
        } catch (const std::exception& e) {
          status = "error";
          error = e.what();
          ++summary.failed;
        }
        std::ostringstream row;
        row << c->method << ',' << format_double(eps) << ',' << rep << ',' << c->n << ',' << c->d << ',' << c->p << ','
            << format_double(c->gamma) << ',' << spec.num_nodes << ',' << k << ',' << format_double(spec.avg_degree)
            << ',' << run_seed << ',' << status << ',' << ari << ',' << mod << ',' << lam << ',' << fallback << ','
            << conv << ',' << total << ',' << stages << ',' << detail::csv_quote(error) << '\n';
        out << row.str();
        out.flush();
        ++summary.runs;
        if (progress) progress(row.str());
      }
    }
  }
  return summary;
}

}  // namespace csc
