#pragma once

// Second-order statistics of the cascaded channel F = G * Phi * H and the
// reduction of the post-MRC SNR to a noncentral Gaussian quadratic form
//   Q = || mu + z ||^2,  z ~ CN(0, a I + b m_r m_r^H),  mu = alpha ||m_t|| m_r.

#include "rissnr/arrays.hpp"
#include "rissnr/errors.hpp"
#include "rissnr/ris.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace rissnr {

struct RicianHop {
  double k_factor = 0.0;
  double nlos_variance = 1.0;

  void validate() const {
    if (!(k_factor >= 0.0) || !std::isfinite(k_factor))
      throw std::invalid_argument("Rician K-factor must be finite and nonnegative");
    if (!(nlos_variance > 0.0) || !std::isfinite(nlos_variance))
      throw std::invalid_argument("NLoS variance must be positive");
  }

  double los_gain() const { return std::sqrt(k_factor / (k_factor + 1.0)); }
  double nlos_gain() const { return std::sqrt(1.0 / (k_factor + 1.0)); }
  bool unit_variance() const { return nlos_variance == 1.0; }
};

struct CovarianceCoeffs {
  double a = 0.0;  // isotropic part
  double b = 0.0;  // weight on m_r m_r^H
};

struct CascadeStats {
  cd alpha{0.0, 0.0};
  double sigma_entry = 0.0;  // Var(f_{r,t}), identical for all entries
  double cov_a = 0.0;
  double cov_b = 0.0;
  SteeringVector m_t;
  SteeringVector m_r;
};

// Eigenvalues and squared rotated-mean magnitudes of Q; all the SPA needs.
struct QuadFormSpec {
  std::vector<double> lambdas;
  std::vector<double> noncentralities;

  std::size_t size() const noexcept { return lambdas.size(); }

  double lambda_max() const { return *std::max_element(lambdas.begin(), lambdas.end()); }

  double mean() const {
    return std::accumulate(lambdas.begin(), lambdas.end(), 0.0) +
           std::accumulate(noncentralities.begin(), noncentralities.end(), 0.0);
  }

  double variance() const {
    double v = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
      v += lambdas[i] * lambdas[i] + 2.0 * lambdas[i] * noncentralities[i];
    return v;
  }

  void validate() const {
    if (lambdas.empty()) throw std::invalid_argument("quadratic form needs at least one term");
    if (lambdas.size() != noncentralities.size())
      throw std::invalid_argument("eigenvalue and noncentrality vectors differ in length");
    for (std::size_t i = 0; i < size(); ++i) {
      if (!(lambdas[i] > 0.0) || !std::isfinite(lambdas[i]))
        throw std::invalid_argument("quadratic-form eigenvalues must be positive and finite");
      if (!(noncentralities[i] >= 0.0) || !std::isfinite(noncentralities[i]))
        throw std::invalid_argument("noncentralities must be nonnegative and finite");
    }
  }
};

inline cd cascaded_mean_scale(const RicianHop& hop_h, const RicianHop& hop_g, cd eta_ris) {
  hop_h.validate();
  hop_g.validate();
  const double kh = hop_h.k_factor, kg = hop_g.k_factor;
  return std::sqrt(kh * kg / ((kh + 1.0) * (kg + 1.0))) * eta_ris;
}

// Closed form, valid only for unit NLoS variances on both hops.
inline double cascaded_entry_variance(const RicianHop& hop_h, const RicianHop& hop_g, double xi_beta) {
  hop_h.validate();
  hop_g.validate();
  if (!hop_h.unit_variance() || !hop_g.unit_variance())
    throw std::invalid_argument("closed-form entry variance assumes unit NLoS variance on both hops");
  const double kh = hop_h.k_factor, kg = hop_g.k_factor;
  return (kh + kg + 1.0) / ((kh + 1.0) * (kg + 1.0)) * xi_beta;
}

inline CovarianceCoeffs effective_covariance_coeffs(const RicianHop& hop_h, const RicianHop& hop_g,
                                                    double xi_beta, double norm_mt_sq) {
  hop_h.validate();
  hop_g.validate();
  const double kh = hop_h.k_factor, kg = hop_g.k_factor;
  const double sh = hop_h.nlos_variance, sg = hop_g.nlos_variance;
  const double denom = (kg + 1.0) * (kh + 1.0);
  return {xi_beta * sg * (kh * norm_mt_sq + sh) / denom, xi_beta * sh * kg / denom};
}

inline CascadeStats make_cascade_stats(const RicianHop& hop_h, const RicianHop& hop_g,
                                       const RisState& ris, SteeringVector m_t, SteeringVector m_r) {
  CascadeStats st;
  st.alpha = cascaded_mean_scale(hop_h, hop_g, ris.eta_ris);
  {
    // Per-entry variance before specialising to unit NLoS variance.
    const double kh = hop_h.k_factor, kg = hop_g.k_factor;
    const double sh = hop_h.nlos_variance, sg = hop_g.nlos_variance;
    st.sigma_entry = ris.xi_beta * (sg * sh + kg * sh + kh * sg) / ((kg + 1.0) * (kh + 1.0));
  }
  const auto coeffs = effective_covariance_coeffs(hop_h, hop_g, ris.xi_beta, m_t.squared_norm());
  st.cov_a = coeffs.a;
  st.cov_b = coeffs.b;
  st.m_t = std::move(m_t);
  st.m_r = std::move(m_r);
  return st;
}

// M = alpha m_r m_t^H, the deterministic part of F.
inline CMatrix mean_channel(const CascadeStats& stats) {
  return stats.alpha * stats.m_r.entries * stats.m_t.entries.adjoint();
}

// a I + b m_r m_r^H assembled densely (validation and Monte Carlo comparison).
inline CMatrix effective_covariance_matrix(const CascadeStats& stats) {
  CMatrix r = stats.cov_b * stats.m_r.entries * stats.m_r.entries.adjoint();
  r.diagonal().array() += stats.cov_a;
  return r;
}

// Closed-form spectrum of a I + b m_r m_r^H. The mean mu = alpha ||m_t|| m_r
// lies entirely along the top eigenvector m_r / ||m_r||.
inline QuadFormSpec quadform_spec(const CascadeStats& stats, std::size_t n_r) {
  if (stats.m_r.size() != n_r) throw std::invalid_argument("m_r length does not match N_r");
  if (n_r == 0) throw std::invalid_argument("need at least one receive antenna");
  if (!(stats.cov_a > 0.0))
    throw DegenerateDistributionError(
        "isotropic covariance coefficient is zero: the SNR is deterministic");
  if (stats.cov_b < 0.0) throw std::invalid_argument("covariance coefficient b must be nonnegative");

  const double norm_mr_sq = stats.m_r.squared_norm();
  QuadFormSpec spec;
  spec.lambdas.assign(n_r, stats.cov_a);
  spec.noncentralities.assign(n_r, 0.0);
  spec.lambdas[0] = stats.cov_a + stats.cov_b * norm_mr_sq;
  spec.noncentralities[0] = std::norm(stats.alpha) * stats.m_t.squared_norm() * norm_mr_sq;
  return spec;
}

// rho = rho_bar * Q. Distribution queries on rho map to Q at q = rho / rho_bar.
struct SnrDistribution {
  QuadFormSpec spec;
  double rho_bar = 1.0;

  double to_q(double rho) const { return rho / rho_bar; }
  double mean() const { return rho_bar * spec.mean(); }
};

inline SnrDistribution snr_spec(QuadFormSpec spec, double rho_bar) {
  if (!(rho_bar > 0.0) || !std::isfinite(rho_bar))
    throw std::invalid_argument("average SNR scale must be positive");
  spec.validate();
  return {std::move(spec), rho_bar};
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace rissnr
