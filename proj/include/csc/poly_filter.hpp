#pragma once

// Chebyshev approximations of ideal low-pass and high-pass spectral filters on
// the normalized Laplacian, applied with the three-term recurrence.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <fstream>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "csc/error.hpp"
#include "csc/matrix.hpp"
#include "json.hpp"

namespace csc {

enum class Damping { none, jackson };
enum class FilterKind { lowpass, highpass };

inline std::string to_string(Damping d) { return d == Damping::jackson ? "jackson" : "none"; }
inline std::string to_string(FilterKind k) { return k == FilterKind::highpass ? "highpass" : "lowpass"; }

inline Damping parse_damping(const std::string& s) {
  if (s == "jackson") return Damping::jackson;
  if (s == "none") return Damping::none;
  throw ValidationError("unknown damping '" + s + "' (expected jackson or none)");
}

/// Polynomial in L written in the Chebyshev basis of y = lambda - 1.
struct PolyFilter {
  std::vector<double> coeffs;
  double cutoff = 1.0;
  std::size_t order = 0;
  Damping damping = Damping::jackson;
  FilterKind kind = FilterKind::lowpass;

  /// Value of the polynomial at lambda (Clenshaw).
  double operator()(double lambda) const {
    const double y = lambda - 1.0;
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t l = coeffs.size(); l-- > 1;) {
      const double b0 = coeffs[l] + 2.0 * y * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    return coeffs.empty() ? 0.0 : coeffs[0] + y * b1 - b2;
  }

  bool operator==(const PolyFilter&) const = default;
};

/// Jackson kernel multipliers g_0..g_p.
inline std::vector<double> jackson_coefficients(std::size_t p) {
  std::vector<double> g(p + 1);
  const double m = static_cast<double>(p + 2);
  const double a = std::numbers::pi / m;
  for (std::size_t l = 0; l <= p; ++l) {
    const double dl = static_cast<double>(l);
    g[l] = ((1.0 - dl / m) * std::sin(a) * std::cos(dl * a) + std::cos(a) * std::sin(dl * a) / m) / std::sin(a);
  }
  return g;
}

/// Chebyshev approximation of the step 1{lambda <= cutoff} of order p.
inline PolyFilter design_lowpass(double cutoff, std::size_t p, Damping damping = Damping::jackson) {
  if (!(cutoff > 0.0 && cutoff < 2.0))
    throw ValidationError("design_lowpass: cutoff must lie in (0, 2), got " + std::to_string(cutoff));
  if (p < 1) throw ValidationError("design_lowpass: order must be at least 1");
  const double theta = std::acos(cutoff - 1.0);
  PolyFilter f;
  f.cutoff = cutoff;
  f.order = p;
  f.damping = damping;
  f.kind = FilterKind::lowpass;
  f.coeffs.resize(p + 1);
  f.coeffs[0] = (std::numbers::pi - theta) / std::numbers::pi;
  for (std::size_t l = 1; l <= p; ++l)
    f.coeffs[l] = -2.0 * std::sin(static_cast<double>(l) * theta) / (std::numbers::pi * static_cast<double>(l));
  if (damping == Damping::jackson) {
    const auto g = jackson_coefficients(p);
    for (std::size_t l = 0; l <= p; ++l) f.coeffs[l] *= g[l];
  }
  return f;
}

/// 1 - f, with coefficients negated and the constant term adjusted.
inline PolyFilter complement(const PolyFilter& f) {
  PolyFilter g = f;
  for (double& c : g.coeffs) c = -c;
  if (g.coeffs.empty()) g.coeffs.push_back(0.0);
  g.coeffs[0] = 1.0 - f.coeffs[0];
  g.kind = f.kind == FilterKind::lowpass ? FilterKind::highpass : FilterKind::lowpass;
  return g;
}

inline PolyFilter design_highpass(double cutoff, std::size_t p, Damping damping = Damping::jackson) {
  return complement(design_lowpass(cutoff, p, damping));
}

/// Smallest shift rho that makes f + rho nonnegative on a dense grid of [0, 2],
/// plus 1e-8.
inline double positivity_ridge(const PolyFilter& f, std::size_t grid = 4001) {
  double mn = 0.0;
  for (std::size_t i = 0; i < grid; ++i) mn = std::min(mn, f(2.0 * static_cast<double>(i) / static_cast<double>(grid - 1)));
  return -mn + 1e-8;
}

/// Operators the recurrence can run on: Y = (L - I) X for an N x d block.
template <class Op>
concept ShiftedOperator = requires(const Op& op, const Matrix& x, Matrix& y) {
  { op.size() } -> std::convertible_to<std::size_t>;
  op.apply_shifted(x, y);
};

/// f(L) X via T_{l+1} = 2(L - I) T_l - T_{l-1}.
template <ShiftedOperator Op>
Matrix apply_filter(const PolyFilter& f, const Op& op, const Matrix& x) {
  if (x.rows() != op.size())
    throw ValidationError("apply_filter: input has " + std::to_string(x.rows()) + " rows, operator has " +
                          std::to_string(op.size()));
  const std::size_t p = f.coeffs.empty() ? 0 : f.coeffs.size() - 1;
  Matrix out(x.rows(), x.cols());
  auto ov = out.values();
  auto xv = x.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = (f.coeffs.empty() ? 0.0 : f.coeffs[0]) * xv[i];
  if (p == 0) return out;
  Matrix prev = x;
  Matrix cur(x.rows(), x.cols());
  op.apply_shifted(x, cur);
  axpy(f.coeffs[1], cur.values(), ov);
  Matrix next(x.rows(), x.cols());
  for (std::size_t l = 2; l <= p; ++l) {
    op.apply_shifted(cur, next);
    auto nv = next.values();
    auto pv = prev.values();
    const double c = f.coeffs[l];
    for (std::size_t i = 0; i < nv.size(); ++i) {
      nv[i] = 2.0 * nv[i] - pv[i];
      ov[i] += c * nv[i];
    }
    std::swap(prev, cur);
    std::swap(cur, next);
  }
  return out;
}

struct ErrorBudget {
  double e1 = 0.0;
  double e2 = 0.0;
  double em() const { return std::max(e1, e2); }
};

/// Sup errors of `response` against the ideal low-pass response that keeps
/// exactly the first k eigenvalues.
template <class Response>
ErrorBudget error_split(const Response& response, std::span<const double> eigenvalues, std::size_t k) {
  if (k < 1 || k >= eigenvalues.size())
    throw ValidationError("error_split: need 1 <= k < number of eigenvalues");
  ErrorBudget b;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const double v = response(eigenvalues[i]);
    if (i < k)
      b.e1 = std::max(b.e1, std::abs(v - 1.0));
    else
      b.e2 = std::max(b.e2, std::abs(v));
  }
  return b;
}

struct ResolutionCheck {
  double split_lhs = 0.0;  // sqrt|e1^2 - e2^2| + sqrt(2) e2 / (D v_min)
  double em_lhs = 0.0;     // sqrt(2) e_m / (D v_min)
  double rhs = 0.0;        // delta / (2 + delta)
  bool split_ok = false;
  bool em_ok = false;
  double split_slack() const { return rhs - split_lhs; }
  double em_slack() const { return rhs - em_lhs; }
};

/// Evaluates the filter-error conditions under which the feature distances
/// stay within a relative error delta for pairs at least d_min apart.
inline ResolutionCheck check_resolution_bound(const ErrorBudget& b, double v_min, double d_min, double delta) {
  if (!(v_min > 0.0)) throw NumericError("check_resolution_bound: min_i v_k(i) must be positive");
  if (!(d_min > 0.0 && d_min <= std::sqrt(2.0) + 1e-15))
    throw ValidationError("check_resolution_bound: resolution must lie in (0, sqrt(2)]");
  if (!(delta > 0.0 && delta <= 1.0)) throw ValidationError("check_resolution_bound: delta must lie in (0, 1]");
  ResolutionCheck c;
  const double scale = d_min * v_min;
  c.split_lhs = std::sqrt(std::abs(b.e1 * b.e1 - b.e2 * b.e2)) + std::sqrt(2.0) * b.e2 / scale;
  c.em_lhs = std::sqrt(2.0) * b.em() / scale;
  c.rhs = delta / (2.0 + delta);
  c.split_ok = c.split_lhs <= c.rhs;
  c.em_ok = c.em_lhs <= c.rhs;
  return c;
}

inline nlohmann::json to_json(const PolyFilter& f) {
  return {{"cutoff", f.cutoff},
          {"order", f.order},
          {"damping", to_string(f.damping)},
          {"kind", to_string(f.kind)},
          {"coefficients", f.coeffs}};
}

inline PolyFilter filter_from_json(const nlohmann::json& j) {
  try {
    PolyFilter f;
    f.cutoff = j.at("cutoff").get<double>();
    f.order = j.at("order").get<std::size_t>();
    f.damping = parse_damping(j.at("damping").get<std::string>());
    const auto kind = j.value("kind", std::string("lowpass"));
    if (kind != "lowpass" && kind != "highpass") throw ValidationError("unknown filter kind '" + kind + "'");
    f.kind = kind == "highpass" ? FilterKind::highpass : FilterKind::lowpass;
    f.coeffs = j.at("coefficients").get<std::vector<double>>();
    if (f.coeffs.size() != f.order + 1) throw ValidationError("filter JSON: coefficient count does not match order");
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("filter JSON: ") + e.what());
  }
}

inline void save_filter(const PolyFilter& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << to_json(f).dump(2) << '\n';
}

inline PolyFilter load_filter(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("filter JSON: ") + e.what());
  }
  return filter_from_json(j);
}

}  // namespace csc
