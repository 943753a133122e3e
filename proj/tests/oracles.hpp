#pragma once

// Reference implementations used only by the tests. They deliberately avoid
// the library's own code paths.

#include <boost/math/special_functions/gamma.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace oracle {

// Q = lambda * Gamma(shape n): sum of n iid exponentials with mean lambda.
inline double gamma_cdf(double q, int n, double lambda) {
  if (q <= 0.0) return 0.0;
  return boost::math::gamma_p(static_cast<double>(n), q / lambda);
}

// Q = |mu + z|^2, z ~ CN(0, lambda), |mu|^2 = m. Poisson mixture of Gamma(j+1)
// CDFs, i.e. the 2-DoF noncentral chi-square (1 - Marcum Q_1).
inline double noncentral_cdf(double q, double lambda, double m) {
  if (q <= 0.0) return 0.0;
  const double nu = m / lambda;  // Poisson mean
  const double x = q / lambda;
  // Sum outward from the Poisson mode so large nu does not underflow.
  const long mode = static_cast<long>(std::floor(nu));
  auto weight = [&](long j) { return std::exp(-nu + j * std::log(nu > 0 ? nu : 1.0) - std::lgamma(j + 1.0)); };
  if (nu == 0.0) return boost::math::gamma_p(1.0, x);
  double sum = 0.0;
  for (long j = mode; j >= 0; --j) {
    const double w = weight(j);
    sum += w * boost::math::gamma_p(static_cast<double>(j + 1), x);
    if (w < 1e-18 && j < mode - 10) break;
  }
  for (long j = mode + 1;; ++j) {
    const double w = weight(j);
    sum += w * boost::math::gamma_p(static_cast<double>(j + 1), x);
    if (w < 1e-18 && j > mode + 10) break;
    if (j > mode + 100000) throw std::runtime_error("noncentral series did not terminate");
  }
  return sum;
}

// Quantile by bisection on any monotone CDF.
template <class F>
double quantile(F&& cdf, double p, double lo, double hi) {
  while (cdf(hi) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct DenseSpectrum {
  std::vector<double> lambdas;           // descending
  std::vector<double> noncentralities;  // |u_i^H mu|^2 in the same order
};

inline DenseSpectrum dense_spectrum(const Eigen::MatrixXcd& r, const Eigen::VectorXcd& mu) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  DenseSpectrum out;
  const auto n = r.rows();
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    out.lambdas.push_back(es.eigenvalues()(i));
    out.noncentralities.push_back(std::norm(es.eigenvectors().col(i).dot(mu)));
  }
  return out;
}

}  // namespace oracle
