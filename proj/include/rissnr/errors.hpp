#pragma once

#include <stdexcept>
#include <string>

namespace rissnr {

// Argument outside a function's domain (e.g. s >= 1/lambda_max for the MGF).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The SNR collapses to a point mass (no diffuse component left).
class DegenerateDistributionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Saddle-point root finder failed to meet its residual tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double q, double s_last, int iterations)
      : std::runtime_error(what), q_(q), s_last_(s_last), iterations_(iterations) {}

  double q() const noexcept { return q_; }
  double last_s() const noexcept { return s_last_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double q_;
  double s_last_;
  int iterations_;
};

// Numerical inversion oracle could not reach its accuracy target.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rissnr
