#pragma once

// Random-signal node features: filter d random signals with the low-pass
// filter and normalize the rows.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "csc/error.hpp"
#include "csc/matrix.hpp"
#include "csc/poly_filter.hpp"
#include "csc/rng.hpp"
#include "json.hpp"

namespace csc {

enum class SignalDistribution { gaussian, bernoulli };

inline std::string to_string(SignalDistribution d) {
  return d == SignalDistribution::bernoulli ? "bernoulli" : "gaussian";
}

inline SignalDistribution parse_distribution(const std::string& s) {
  if (s == "gaussian") return SignalDistribution::gaussian;
  if (s == "bernoulli") return SignalDistribution::bernoulli;
  throw ValidationError("unknown signal distribution '" + s + "'");
}

struct RandomSignals {
  Matrix r;
  SignalDistribution distribution = SignalDistribution::gaussian;
  std::uint64_t seed = 0;
};

/// N x d signals, entries N(0, 1/d) or +-1/sqrt(d).
inline RandomSignals generate_signals(std::size_t n, std::size_t d, SignalDistribution dist, std::uint64_t seed) {
  if (d < 1) throw ValidationError("generate_signals: d must be at least 1");
  RandomSignals s{Matrix(n, d), dist, seed};
  Rng rng = make_rng(seed, "signals");
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  if (dist == SignalDistribution::gaussian) {
    std::normal_distribution<double> gauss(0.0, scale);
    for (double& v : s.r.values()) v = gauss(rng);
  } else {
    for (double& v : s.r.values()) v = (rng() >> 63) ? scale : -scale;
  }
  return s;
}

struct FeatureMatrix {
  Matrix rows;
  bool normalized = false;
  /// Norm of each row before normalization; approximates v_k(i).
  std::vector<double> row_norms;
  /// Rows whose norm vanished; left as zero vectors.
  std::vector<std::size_t> zero_rows;
  std::vector<std::string> warnings;
};

/// Row-normalizes an already filtered block.
inline FeatureMatrix normalize_features(Matrix filtered) {
  FeatureMatrix f;
  const std::size_t n = filtered.rows();
  f.row_norms.resize(n);
  double mx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    f.row_norms[i] = norm2(filtered.row(i));
    mx = std::max(mx, f.row_norms[i]);
  }
  const double floor = 1e-12 * mx;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = filtered.row(i);
    if (!(f.row_norms[i] > floor)) {
      std::fill(row.begin(), row.end(), 0.0);
      f.zero_rows.push_back(i);
      continue;
    }
    for (double& v : row) v /= f.row_norms[i];
  }
  if (filtered.cols() == 1) f.warnings.push_back("d = 1: features are one-dimensional and distances degenerate");
  if (!f.zero_rows.empty())
    f.warnings.push_back(std::to_string(f.zero_rows.size()) + " feature row(s) have zero norm");
  f.rows = std::move(filtered);
  f.normalized = true;
  return f;
}

template <ShiftedOperator Op>
FeatureMatrix build_features(const Op& op, const PolyFilter& lowpass, const RandomSignals& signals) {
  return normalize_features(apply_filter(lowpass, op, signals.r));
}

/// Features from an arbitrary filter application X -> h(L) X.
template <class Apply>
FeatureMatrix build_features_with(Apply&& apply, const RandomSignals& signals) {
  return normalize_features(apply(signals.r));
}

inline double pairwise_distance(const FeatureMatrix& f, std::size_t i, std::size_t j) {
  if (i >= f.rows.rows() || j >= f.rows.rows()) throw ValidationError("pairwise_distance: index out of range");
  return distance(f.rows.row(i), f.rows.row(j));
}

/// One JSON header line followed by the rows as raw little-endian doubles.
inline void dump_features(const FeatureMatrix& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  nlohmann::json h{{"rows", f.rows.rows()},
                   {"cols", f.rows.cols()},
                   {"dtype", "float64"},
                   {"order", "row-major"},
                   {"normalized", f.normalized},
                   {"zero_rows", f.zero_rows}};
  out << h.dump() << '\n';
  out.write(reinterpret_cast<const char*>(f.rows.data()),
            static_cast<std::streamsize>(f.rows.values().size() * sizeof(double)));
}

inline FeatureMatrix load_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("feature header: ") + e.what());
  }
  FeatureMatrix f;
  f.rows = Matrix(h.at("rows").get<std::size_t>(), h.at("cols").get<std::size_t>());
  f.normalized = h.value("normalized", false);
  f.zero_rows = h.value("zero_rows", std::vector<std::size_t>{});
  in.read(reinterpret_cast<char*>(f.rows.data()), static_cast<std::streamsize>(f.rows.values().size() * sizeof(double)));
  if (!in) throw ParseError(2, "feature dump truncated");
  return f;
}

}  // namespace csc
