#pragma once

// Array steering vectors for the transmit URA, the RIS URA and the receive ULA.
//
// Phase convention: entry i carries exp(-j * 2*pi * spacing * i * direction_cosine),
// with spacings measured in carrier wavelengths. Every other header relies on
// this single sign convention.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace rissnr {

using cd = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct UlaGeometry {
  std::size_t n_elements = 1;
  double spacing = 0.5;  // in wavelengths

  void validate() const {
    if (n_elements < 1) throw std::invalid_argument("ULA needs at least one element");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
      throw std::invalid_argument("ULA spacing must be positive");
  }
};

struct UraGeometry {
  std::size_t n_x = 1;
  std::size_t n_y = 1;
  double spacing_x = 0.5;
  double spacing_y = 0.5;

  std::size_t size() const noexcept { return n_x * n_y; }

  void validate() const {
    if (n_x < 1 || n_y < 1) throw std::invalid_argument("URA needs at least one element per axis");
    if (!(spacing_x > 0.0) || !(spacing_y > 0.0) || !std::isfinite(spacing_x) ||
        !std::isfinite(spacing_y))
      throw std::invalid_argument("URA spacings must be positive");
  }
};

struct AnglePair {
  double azimuth = 0.0;    // radians
  double elevation = 0.0;  // radians
};

// Unit-modulus response vector; entry 0 is always exactly 1.
struct SteeringVector {
  CVector entries;

  std::size_t size() const noexcept { return static_cast<std::size_t>(entries.size()); }
  double squared_norm() const { return entries.squaredNorm(); }
  const cd& operator[](std::size_t i) const { return entries(static_cast<Eigen::Index>(i)); }
};

namespace detail {

inline CVector linear_phase_ramp(std::size_t n, double spacing, double direction_cosine) {
  CVector v(static_cast<Eigen::Index>(n));
  const double step = -2.0 * std::numbers::pi * spacing * direction_cosine;
  for (std::size_t i = 0; i < n; ++i) {
    // std::polar keeps |entry| == 1 to the last ulp, unlike repeated multiplication.
    v(static_cast<Eigen::Index>(i)) = std::polar(1.0, step * static_cast<double>(i));
  }
  return v;
}

}  // namespace detail

inline SteeringVector ula_steering(const UlaGeometry& geom, double angle) {
  geom.validate();
  if (!std::isfinite(angle)) throw std::invalid_argument("steering angle must be finite");
  return {detail::linear_phase_ramp(geom.n_elements, geom.spacing, std::sin(angle))};
}

// a_x(u) kron a_y(v), u = sin(el)cos(az), v = sin(el)sin(az).
// Element (i_x, i_y) lands at index i_x * n_y + i_y.
inline SteeringVector ura_steering(const UraGeometry& geom, const AnglePair& angle) {
  geom.validate();
  if (!std::isfinite(angle.azimuth) || !std::isfinite(angle.elevation))
    throw std::invalid_argument("steering angles must be finite");
  const double u = std::sin(angle.elevation) * std::cos(angle.azimuth);
  const double v = std::sin(angle.elevation) * std::sin(angle.azimuth);
  const CVector ax = detail::linear_phase_ramp(geom.n_x, geom.spacing_x, u);
  const CVector ay = detail::linear_phase_ramp(geom.n_y, geom.spacing_y, v);
  CVector out(static_cast<Eigen::Index>(geom.size()));
  for (Eigen::Index ix = 0; ix < ax.size(); ++ix)
    out.segment(ix * ay.size(), ay.size()) = ax(ix) * ay;
  return {std::move(out)};
}

// Squarest n_x * n_y = n with n_x <= n_y (100 -> 10x10, 4 -> 2x2, 8 -> 2x4).
inline std::pair<std::size_t, std::size_t> squarest_factorization(std::size_t n) {
  if (n == 0) throw std::invalid_argument("cannot factor zero elements");
  auto nx = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (nx > 1 && n % nx != 0) --nx;
  if (nx == 0) nx = 1;
  return {nx, n / nx};
}

inline UraGeometry square_ura(std::size_t n, double spacing = 0.5) {
  const auto [nx, ny] = squarest_factorization(n);
  return {nx, ny, spacing, spacing};
}

}  // namespace rissnr
