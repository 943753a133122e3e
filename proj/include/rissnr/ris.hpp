#pragma once

// RIS reflection model: b-bit phase codebooks, phase-dependent amplitude,
// coherent phase alignment and the two scalars the statistics depend on
// (combining gain eta and reflected power xi = sum beta_n^2).

#include "rissnr/arrays.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rissnr {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct AmplitudeModel {
  double zeta_min = 0.8;
  double c = 0.43 * std::numbers::pi;  // phase offset, radians
  double k = 1.6;

  void validate() const {
    if (!(zeta_min >= 0.0 && zeta_min <= 1.0))
      throw std::invalid_argument("zeta_min must lie in [0, 1]");
    if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("amplitude exponent k must be positive");
    if (!std::isfinite(c)) throw std::invalid_argument("amplitude offset c must be finite");
  }

  static AmplitudeModel ideal() { return {1.0, 0.0, 1.0}; }
};

enum class PhaseMode { random, optimal_continuous, optimal_discrete };

inline std::string_view to_string(PhaseMode m) {
  switch (m) {
    case PhaseMode::random: return "random";
    case PhaseMode::optimal_continuous: return "optimal-continuous";
    case PhaseMode::optimal_discrete: return "optimal-discrete";
  }
  return "?";
}

inline PhaseMode parse_phase_mode(std::string_view s) {
  if (s == "random") return PhaseMode::random;
  if (s == "optimal-continuous") return PhaseMode::optimal_continuous;
  if (s == "optimal-discrete") return PhaseMode::optimal_discrete;
  throw std::invalid_argument("unknown phase policy '" + std::string(s) + "'");
}

struct PhasePolicy {
  PhaseMode mode = PhaseMode::optimal_discrete;
  std::optional<int> bits = 2;  // nullopt: continuous phases
  // false reproduces the plain |phi - phi_c| nearest-point rule, which
  // sends phases just below 2*pi to the largest codeword instead of 0.
  bool circular_quantization = true;

  void validate() const {
    if (bits && *bits < 1) throw std::invalid_argument("phase resolution must be at least one bit");
    if (bits && *bits > 30) throw std::invalid_argument("phase resolution above 30 bits is not supported");
    if (mode == PhaseMode::optimal_discrete && !bits)
      throw std::invalid_argument("optimal-discrete phases need a bit count");
  }
};

struct RisState {
  std::vector<double> phases;      // [0, 2*pi)
  std::vector<double> amplitudes;  // beta_n
  CVector reflection;              // Gamma_n = beta_n exp(j phi_n)
  cd eta_ris{0.0, 0.0};
  double xi_beta = 0.0;
  double sum_beta = 0.0;

  std::size_t size() const noexcept { return phases.size(); }
};

inline double wrap_phase(double phase) {
  double r = std::fmod(phase, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;  // fmod of a value just below a multiple of 2*pi
  return r;
}

inline double amplitude_response(double phase, const AmplitudeModel& model) {
  const double s = std::abs(std::sin(phase - model.c)) / 2.0;
  return (1.0 - model.zeta_min) * std::pow(s, model.k) + model.zeta_min;
}

inline std::vector<double> quantized_phase_set(int bits) {
  if (bits < 1) throw std::invalid_argument("phase resolution must be at least one bit");
  if (bits > 30) throw std::invalid_argument("phase resolution above 30 bits is not supported");
  const std::size_t levels = std::size_t{1} << bits;
  std::vector<double> set(levels);
  for (std::size_t l = 0; l < levels; ++l)
    set[l] = kTwoPi * static_cast<double>(l) / static_cast<double>(levels);
  return set;
}

inline double optimal_continuous_phase(std::size_t n, const SteeringVector& a_out,
                                       const SteeringVector& a_in) {
  if (a_out.size() != a_in.size()) throw std::invalid_argument("steering vectors differ in length");
  if (n >= a_out.size()) throw std::out_of_range("RIS element index out of range");
  return wrap_phase(-std::arg(std::conj(a_out[n]) * a_in[n]));
}

// Nearest codeword of the b-bit set. Ties go to the smaller codeword.
inline double quantize_phase(double phase_c, int bits, bool circular = true) {
  if (!std::isfinite(phase_c)) throw std::invalid_argument("phase must be finite");
  if (bits < 1) throw std::invalid_argument("phase resolution must be at least one bit");
  if (bits > 30) throw std::invalid_argument("phase resolution above 30 bits is not supported");
  const std::int64_t levels = std::int64_t{1} << bits;
  const double step = kTwoPi / static_cast<double>(levels);
  const double x = wrap_phase(phase_c) / step;  // codeword units, [0, levels)
  const auto lo = static_cast<std::int64_t>(std::floor(x));

  std::int64_t best = 0;
  double best_d = 1e300;
  auto consider = [&](std::int64_t l) {
    double d;
    if (circular) {
      const double raw = std::abs(x - static_cast<double>(l));
      d = std::min(raw, static_cast<double>(levels) - raw);
      l = ((l % levels) + levels) % levels;
    } else {
      if (l < 0 || l >= levels) return;
      d = std::abs(x - static_cast<double>(l));
    }
    constexpr double kTieTol = 1e-12;
    if (d < best_d - kTieTol || (std::abs(d - best_d) <= kTieTol && l < best)) {
      best = l;
      best_d = d;
    }
  };
  consider(lo);
  consider(lo + 1);
  if (!circular) consider(lo - 1);
  return step * static_cast<double>(best);
}

// Phases per policy, amplitudes from the applied phases, then eta and xi.
inline RisState build_ris_state(const PhasePolicy& policy, const AmplitudeModel& model,
                                const SteeringVector& a_out, const SteeringVector& a_in,
                                std::uint64_t seed) {
  policy.validate();
  model.validate();
  if (a_out.size() != a_in.size()) throw std::invalid_argument("steering vectors differ in length");
  const std::size_t n = a_out.size();

  RisState st;
  st.phases.resize(n);
  st.amplitudes.resize(n);
  st.reflection.resize(static_cast<Eigen::Index>(n));

  switch (policy.mode) {
    case PhaseMode::random: {
      std::mt19937_64 gen(seed);
      if (policy.bits) {
        const std::int64_t levels = std::int64_t{1} << *policy.bits;
        std::uniform_int_distribution<std::int64_t> pick(0, levels - 1);
        for (auto& p : st.phases)
          p = kTwoPi * static_cast<double>(pick(gen)) / static_cast<double>(levels);
      } else {
        std::uniform_real_distribution<double> pick(0.0, kTwoPi);
        for (auto& p : st.phases) p = pick(gen);
      }
      break;
    }
    case PhaseMode::optimal_continuous:
      for (std::size_t i = 0; i < n; ++i) st.phases[i] = optimal_continuous_phase(i, a_out, a_in);
      break;
    case PhaseMode::optimal_discrete:
      for (std::size_t i = 0; i < n; ++i)
        st.phases[i] = quantize_phase(optimal_continuous_phase(i, a_out, a_in), *policy.bits,
                                      policy.circular_quantization);
      break;
  }

  cd eta{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double beta = amplitude_response(st.phases[i], model);
    st.amplitudes[i] = beta;
    const cd gamma = std::polar(beta, st.phases[i]);
    const auto idx = static_cast<Eigen::Index>(i);
    st.reflection(idx) = gamma;
    eta += std::conj(a_out.entries(idx)) * gamma * a_in.entries(idx);
    st.xi_beta += beta * beta;
    st.sum_beta += beta;
  }
  st.eta_ris = eta;
  return st;
}

}  // namespace rissnr
