#pragma once

// Saddle-point machinery for Q = sum_i |mu_i + z_i|^2, z_i ~ CN(0, lambda_i):
// CGF and its derivatives, a bracketed Newton saddle solve, the SPA density
// and the Lugannani-Rice CDF.

#include "rissnr/chanstats.hpp"
#include "rissnr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rissnr {

struct CgfEval {
  double s = 0.0;
  double value = 0.0;  // K(s)
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

struct SaddleSolution {
  double s_hat = 0.0;
  double q = 0.0;
  CgfEval cgf;
  int iterations = 0;
  bool converged = false;
};

enum class CdfBranch { standard, near_mean_limit, blended };

inline const char* to_string(CdfBranch b) {
  switch (b) {
    case CdfBranch::standard: return "standard";
    case CdfBranch::near_mean_limit: return "near-mean-limit";
    case CdfBranch::blended: return "blended";
  }
  return "?";
}

struct DistributionResult {
  double value = 0.0;
  CdfBranch branch = CdfBranch::standard;
  SaddleSolution diagnostics;
  bool clamped = false;  // raw value fell outside [0,1] (CDF) or below 0 (PDF)
};

struct SaddleOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  int max_iterations = 300;
};

// |w| below near_mean_w uses the w -> 0 limit; up to blend_w the limit and
// the Lugannani-Rice value are mixed linearly in |w|.
struct CdfOptions {
  SaddleOptions saddle{};
  double near_mean_w = 1e-4;
  double blend_w = 1e-2;
};

namespace detail {

inline void check_domain(const QuadFormSpec& spec, double s) {
  if (!std::isfinite(s)) throw DomainError("CGF argument must be finite");
  for (double l : spec.lambdas)
    if (!(s * l < 1.0)) throw DomainError("CGF argument outside s < 1/lambda_max");
}

// y/(1-y) + log(1-y) >= 0, accurate for small |y|.
inline double entropy_gap(double y) {
  if (std::abs(y) < 1e-3) {
    const double y2 = y * y;
    return y2 * (0.5 + y * (2.0 / 3.0 + y * (0.75 + y * (0.8 + y * (5.0 / 6.0)))));
  }
  return y / (1.0 - y) + std::log1p(-y);
}

// s*K'(s) - K(s) as a sum of nonnegative terms; the exponent of the SPA.
inline double legendre_gap(const QuadFormSpec& spec, double s) {
  double r = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double l = spec.lambdas[i];
    const double x = 1.0 - s * l;
    r += entropy_gap(s * l) + spec.noncentralities[i] * s * s * l / (x * x);
  }
  return r;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace detail

inline CgfEval cgf_eval(const QuadFormSpec& spec, double s) {
  detail::check_domain(spec, s);
  CgfEval e;
  e.s = s;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double l = spec.lambdas[i];
    const double m = spec.noncentralities[i];
    const double x = 1.0 - s * l;
    const double x2 = x * x;
    e.value += -std::log1p(-s * l) + s * m / x;
    e.d1 += l / x + m / x2;
    e.d2 += l * l / x2 + 2.0 * l * m / (x2 * x);
    e.d3 += 2.0 * l * l * l / (x2 * x) + 6.0 * l * l * m / (x2 * x2);
  }
  return e;
}

inline double mgf(const QuadFormSpec& spec, double s) { return std::exp(cgf_eval(spec, s).value); }

// Solves K'(s) = q. K' is strictly increasing with a pole at 1/lambda_max, so
// Newton steps are kept inside a shrinking bracket and replaced by bisection
// whenever they leave it.
inline SaddleSolution solve_saddle(const QuadFormSpec& spec, double q, const SaddleOptions& opt = {}) {
  spec.validate();
  if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument("saddle point needs q > 0");

  const double tol = opt.rtol * q + opt.atol;
  SaddleSolution sol;
  sol.q = q;

  CgfEval at = cgf_eval(spec, 0.0);
  if (std::abs(at.d1 - q) <= tol) {
    sol.cgf = at;
    sol.converged = true;
    return sol;
  }

  double lo, hi;
  if (q > at.d1) {
    lo = 0.0;
    hi = (1.0 - 1e-12) / spec.lambda_max();
    if (cgf_eval(spec, hi).d1 < q)
      throw SolverError("q beyond the representable right tail", q, hi, 0);
  } else {
    hi = 0.0;
    lo = -1.0 / q;
    int expand = 0;
    while (cgf_eval(spec, lo).d1 >= q) {
      lo *= 2.0;
      if (++expand > 200) throw SolverError("could not bracket the saddle point", q, lo, expand);
    }
  }

  double s = 0.0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const double g = at.d1 - q;
    if (g > 0.0) hi = std::min(hi, s); else lo = std::max(lo, s);

    double next = s - g / at.d2;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    s = next;
    at = cgf_eval(spec, s);
    sol.iterations = it;

    if (std::abs(at.d1 - q) <= tol) {
      sol.s_hat = s;
      sol.cgf = at;
      sol.converged = true;
      return sol;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)))
      break;
  }
  throw SolverError("saddle point iteration did not converge for q = " + std::to_string(q), q, s,
                    sol.iterations);
}

inline DistributionResult pdf(const QuadFormSpec& spec, double q, const SaddleOptions& opt = {}) {
  DistributionResult res;
  res.diagnostics = solve_saddle(spec, q, opt);
  const auto& sp = res.diagnostics;
  const double r = detail::legendre_gap(spec, sp.s_hat) + sp.s_hat * (q - sp.cgf.d1);
  double f = std::exp(-r) / std::sqrt(2.0 * std::numbers::pi * sp.cgf.d2);
  if (!(f >= 0.0)) {
    f = 0.0;
    res.clamped = true;
  }
  res.value = f;
  return res;
}

inline DistributionResult cdf(const QuadFormSpec& spec, double q, const CdfOptions& opt = {}) {
  DistributionResult res;
  res.diagnostics = solve_saddle(spec, q, opt.saddle);
  const auto& sp = res.diagnostics;
  const double s = sp.s_hat;
  const double r = std::max(0.0, detail::legendre_gap(spec, s) + s * (q - sp.cgf.d1));
  const double w = (s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0)) * std::sqrt(2.0 * r);
  const double aw = std::abs(w);

  // Continuation of the w -> 0 limit: reduces to 1/2 + K'''/(6 sqrt(2 pi) K''^{3/2}) at w = 0.
  auto near_mean = [&] {
    const double skew = sp.cgf.d3 / std::pow(sp.cgf.d2, 1.5);
    return detail::normal_cdf(w) + detail::normal_pdf(w) * skew / 6.0;
  };
  auto lugannani_rice = [&] {
    const double u = s * std::sqrt(sp.cgf.d2);
    return detail::normal_cdf(w) + detail::normal_pdf(w) * (1.0 / w - 1.0 / u);
  };

  double f;
  if (aw < opt.near_mean_w || s == 0.0) {
    f = near_mean();
    res.branch = CdfBranch::near_mean_limit;
  } else if (aw < opt.blend_w) {
    const double t = (aw - opt.near_mean_w) / (opt.blend_w - opt.near_mean_w);
    f = t * lugannani_rice() + (1.0 - t) * near_mean();
    res.branch = CdfBranch::blended;
  } else {
    f = lugannani_rice();
    res.branch = CdfBranch::standard;
  }
  if (f < 0.0 || f > 1.0 || !std::isfinite(f)) {
    res.clamped = true;
    f = std::isfinite(f) ? std::clamp(f, 0.0, 1.0) : (s < 0.0 ? 0.0 : 1.0);
  }
  res.value = f;
  return res;
}

inline double outage(const QuadFormSpec& spec, double rho_bar, double rho_th, const CdfOptions& opt = {}) {
  if (!(rho_bar > 0.0) || !(rho_th > 0.0))
    throw std::invalid_argument("outage needs positive average SNR and threshold");
  return cdf(spec, rho_th / rho_bar, opt).value;
}

// Densities and probabilities on the SNR scale rho = rho_bar * Q.
inline double snr_pdf(const SnrDistribution& d, double rho) {
  return pdf(d.spec, d.to_q(rho)).value / d.rho_bar;
}
inline double snr_cdf(const SnrDistribution& d, double rho) { return cdf(d.spec, d.to_q(rho)).value; }

}  // namespace rissnr
