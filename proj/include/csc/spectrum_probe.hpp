#pragma once

// Eigenvalue counting with filtered random signals and a dichotomy on the
// cutoff to locate lambda_k without diagonalizing L.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "csc/error.hpp"
#include "csc/graph.hpp"
#include "csc/matrix.hpp"
#include "csc/poly_filter.hpp"
#include "csc/rng.hpp"

namespace csc {

/// Default number of probe signals: 2 ceil(ln N).
inline std::size_t default_probe_signals(std::size_t n) {
  return std::max<std::size_t>(1, 2 * static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(std::max<std::size_t>(n, 2))))));
}

/// N x s Gaussian matrix with entry variance 1/s, so that E ||H R||_F^2 = tr(H^T H).
inline Matrix probe_signals(std::size_t n, std::size_t s, Rng& rng) {
  if (s < 1) throw ValidationError("probe_signals: need at least one signal");
  Matrix r(n, s);
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(s)));
  for (double& v : r.values()) v = gauss(rng);
  return r;
}

struct EigencountEstimate {
  double lambda = 0.0;
  double count = 0.0;
  std::size_t num_signals = 0;
  std::size_t filter_order = 0;
};

/// Estimate of #{lambda_i <= lambda} given a probe block and a callable that
/// applies the low-pass filter at `lambda` to it.
template <class ApplyLowpass>
EigencountEstimate eigencount_with(ApplyLowpass&& apply_lowpass, double lambda, const Matrix& probes,
                                   std::size_t filter_order = 0) {
  const Matrix y = apply_lowpass(lambda, probes);
  const double f = frobenius_norm(y);
  return EigencountEstimate{lambda, f * f, probes.cols(), filter_order};
}

namespace detail {

template <ShiftedOperator Op>
auto jackson_lowpass_applier(const Op& op, std::size_t p, Damping damping) {
  return [&op, p, damping](double lambda, const Matrix& x) {
    if (lambda >= 2.0) return x;  // the whole spectrum passes
    return apply_filter(design_lowpass(lambda, p, damping), op, x);
  };
}

}  // namespace detail

template <ShiftedOperator Op>
EigencountEstimate eigencount(const Op& op, double lambda, std::size_t p, std::size_t num_signals, Rng& rng,
                              Damping damping = Damping::jackson) {
  if (!(lambda > 0.0 && lambda <= 2.0)) throw ValidationError("eigencount: lambda must lie in (0, 2]");
  const Matrix r = probe_signals(op.size(), num_signals, rng);
  return eigencount_with(detail::jackson_lowpass_applier(op, p, damping), lambda, r, p);
}

struct ProbeConfig {
  std::size_t order = 50;
  std::size_t num_signals = 0;  // 0: 2 ceil(ln N)
  std::size_t max_steps = 20;
  bool refine = false;
  Damping damping = Damping::jackson;
};

struct ProbePoint {
  double lambda = 0.0;
  double count = 0.0;
};

struct LambdaKEstimate {
  double lambda_k_hat = 0.0;
  std::size_t iterations = 0;
  std::vector<ProbePoint> trace;
  double lo = 0.0;
  double hi = 2.0;
  bool fallback = false;  // no probe hit k exactly
  std::size_t num_signals = 0;
};

/// Rounds half up.
inline long long round_count(double c) { return static_cast<long long>(std::floor(c + 0.5)); }

/// Bisection on [0, 2] for a cutoff whose estimated eigencount equals k. The
/// same probe block is reused for every cutoff so counts are comparable.
template <class ApplyLowpass>
LambdaKEstimate estimate_lambda_k_with(ApplyLowpass&& apply_lowpass, std::size_t k, const Matrix& probes,
                                       const ProbeConfig& cfg = {}) {
  const std::size_t n = probes.rows();
  if (k < 1 || k >= n) throw ValidationError("estimate_lambda_k: need 1 <= k < N");
  if (cfg.max_steps < 1) throw ValidationError("estimate_lambda_k: max_steps must be positive");
  LambdaKEstimate est;
  est.num_signals = probes.cols();
  const auto target = static_cast<long long>(k);
  bool found = false;
  for (std::size_t step = 0; step < cfg.max_steps; ++step) {
    const double mid = 0.5 * (est.lo + est.hi);
    const double c = eigencount_with(apply_lowpass, mid, probes).count;
    est.trace.push_back({mid, c});
    ++est.iterations;
    const long long rc = round_count(c);
    if (rc == target) {
      est.lambda_k_hat = mid;
      found = true;
      if (cfg.refine && step + 1 < cfg.max_steps && mid - est.lo > 0.01) {
        const double lower = 0.5 * (est.lo + mid);
        const double c2 = eigencount_with(apply_lowpass, lower, probes).count;
        est.trace.push_back({lower, c2});
        ++est.iterations;
        if (round_count(c2) == target) {
          est.lambda_k_hat = lower;
          est.hi = lower;
        } else {
          est.lo = lower;
          est.hi = mid;
        }
      } else {
        est.hi = mid;
      }
      break;
    }
    if (rc < target)
      est.lo = mid;
    else
      est.hi = mid;
  }
  if (!found) {
    est.fallback = true;
    est.lambda_k_hat = 0.5 * (est.lo + est.hi);
  }
  return est;
}

template <ShiftedOperator Op>
LambdaKEstimate estimate_lambda_k(const Op& op, std::size_t k, Rng& rng, const ProbeConfig& cfg = {}) {
  const std::size_t s = cfg.num_signals == 0 ? default_probe_signals(op.size()) : cfg.num_signals;
  const Matrix r = probe_signals(op.size(), s, rng);
  return estimate_lambda_k_with(detail::jackson_lowpass_applier(op, cfg.order, cfg.damping), k, r, cfg);
}

inline void write_probe_trace(const LambdaKEstimate& est, std::ostream& out) {
  out << "lambda,count\n";
  out.precision(17);
  for (const auto& p : est.trace) out << p.lambda << ',' << p.count << '\n';
}

inline void write_probe_trace(const LambdaKEstimate& est, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_probe_trace(est, out);
}

}  // namespace csc
