#pragma once

// Ground-truth machinery: channel-level Monte Carlo of the T -> RIS -> R link,
// direct sampling of the Gaussian quadratic form, empirical covariance of the
// projected scattering vector and Gil-Pelaez inversion of the exact
// characteristic function.
//
// Complex Gaussian convention: CN(0, v) has independent N(0, v/2) real and
// imaginary parts.
//
// Reproducibility: every trial draws from its own generator keyed on
// (seed, trial index), and all reductions run over fixed-size trial blocks in
// block order, so results do not depend on the worker count.

#include "rissnr/arrays.hpp"
#include "rissnr/chanstats.hpp"
#include "rissnr/errors.hpp"
#include "rissnr/ris.hpp"
#include "rissnr/spa.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rissnr {

// ---------------------------------------------------------------------------
// Random streams

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stream domains keep RIS phase draws, channel trials and direct quadratic-form
// samples on unrelated generator states for the same user seed.
enum class StreamDomain : std::uint64_t {
  ris_phases = 0x5249'5350'4841'5345ull,
  channel = 0x4348'414E'4E45'4C00ull,
  quadform = 0x5155'4144'464F'524Dull,
};

inline std::uint64_t derive_seed(std::uint64_t seed, StreamDomain domain, std::uint64_t index = 0) {
  return splitmix64(splitmix64(seed ^ static_cast<std::uint64_t>(domain)) + splitmix64(index));
}

// SplitMix64 as a UniformRandomBitGenerator; cheap to key per trial.
class TrialRng {
 public:
  using result_type = std::uint64_t;

  TrialRng(std::uint64_t seed, StreamDomain domain, std::uint64_t trial)
      : state_(derive_seed(seed, domain, trial)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

class ComplexGaussian {
 public:
  template <class Rng>
  cd operator()(Rng& rng, double variance) {
    const double sd = std::sqrt(0.5 * variance);
    const double re = normal_(rng);
    const double im = normal_(rng);
    return {sd * re, sd * im};
  }

 private:
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// ---------------------------------------------------------------------------
// Parallel block driver

inline constexpr std::size_t kTrialBlock = 4096;

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Calls body(block_index, begin, end) for every block of kTrialBlock trials.
// Blocks are claimed dynamically; callers write results by block index.
template <class Body>
void for_each_block(std::size_t trials, unsigned threads, Body&& body) {
  const std::size_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  auto run_block = [&](std::size_t b) {
    const std::size_t begin = b * kTrialBlock;
    body(b, begin, std::min(trials, begin + kTrialBlock));
  };
  const unsigned n = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(blocks, 1));
  if (n <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) run_block(b);
      } catch (...) {
        errors[t] = std::current_exception();
        next.store(blocks);
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Empirical distributions and goodness-of-fit helpers

struct EmpiricalDistribution {
  std::vector<double> samples;  // ascending
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::size_t failed_trials = 0;

  // Fraction of samples strictly below x.
  double cdf(double x) const {
    const auto it = std::lower_bound(samples.begin(), samples.end(), x);
    return static_cast<double>(it - samples.begin()) / static_cast<double>(samples.size());
  }

  double stderr_at(double x) const {
    const double p = cdf(x);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(samples.size()));
  }

  double quantile(double p) const {
    if (samples.empty()) throw std::logic_error("quantile of an empty sample");
    const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(samples.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= samples.size()) return samples.back();
    return samples[i] + frac * (samples[i + 1] - samples[i]);
  }

  double mean_stderr() const { return std::sqrt(variance / static_cast<double>(samples.size())); }
};

// Moments in index order, then sorting. Both are schedule independent.
inline EmpiricalDistribution make_empirical(std::vector<double> values, std::uint64_t seed,
                                            std::size_t failed = 0) {
  EmpiricalDistribution d;
  d.trials = values.size();
  d.seed = seed;
  d.failed_trials = failed;
  if (!values.empty()) {
    double sum = 0.0;
    for (double v : values) sum += v;
    d.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - d.mean) * (v - d.mean);
    d.variance = values.size() > 1 ? ss / static_cast<double>(values.size() - 1) : 0.0;
  }
  std::sort(values.begin(), values.end());
  d.samples = std::move(values);
  return d;
}

// sup_x |F_n(x) - F(x)| for sorted samples.
template <class Cdf>
double ks_distance(const std::vector<double>& sorted, Cdf&& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

inline double ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

// Asymptotic KS critical value c(alpha) * sqrt(1/n) (one sample) or
// c(alpha) * sqrt((n+m)/(n m)) (two samples).
inline double ks_critical(double alpha, std::size_t n, std::size_t m = 0) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double nn = static_cast<double>(n);
  if (m == 0) return c / std::sqrt(nn);
  const double mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

// Dvoretzky-Kiefer-Wolfowitz: P(sup|F_n - F| > eps) <= alpha.
inline double dkw_epsilon(std::size_t n, double alpha = 0.05) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

// ---------------------------------------------------------------------------
// Link configuration

enum class Precoder { los_aligned, max_eigenvector };

inline std::string_view to_string(Precoder p) {
  return p == Precoder::los_aligned ? "los-aligned" : "max-eigenvector";
}

struct SimConfig {
  UraGeometry tx{2, 2, 0.5, 0.5};
  UlaGeometry rx{4, 0.5};
  UraGeometry ris{10, 10, 0.5, 0.5};
  RicianHop hop_h{10.0, 1.0};
  RicianHop hop_g{10.0, 1.0};
  PhasePolicy policy{};
  AmplitudeModel amplitude{};
  AnglePair tx_angle{std::numbers::pi / 6.0, std::numbers::pi / 4.0};
  AnglePair ris_in{std::numbers::pi / 6.0, std::numbers::pi / 4.0};
  AnglePair ris_out{std::numbers::pi / 3.0, std::numbers::pi / 5.0};
  double rx_angle = std::numbers::pi / 5.0;
  Precoder precoder = Precoder::los_aligned;
  double rho_bar = 1.0;
  std::size_t trials = 1'000'000;
  std::uint64_t seed = 1;
  unsigned threads = 1;  // 0: hardware concurrency
  // Test hook: drop the scattered components (the K -> infinity limit).
  bool deterministic_los = false;

  std::size_t n_t() const { return tx.size(); }
  std::size_t n_r() const { return rx.n_elements; }
  std::size_t n_ris() const { return ris.size(); }

  void validate() const {
    tx.validate();
    rx.validate();
    ris.validate();
    hop_h.validate();
    hop_g.validate();
    policy.validate();
    amplitude.validate();
    if (trials < 1) throw std::invalid_argument("need at least one trial");
    if (!(rho_bar > 0.0)) throw std::invalid_argument("average SNR scale must be positive");
  }
};

// Everything fixed for the duration of an experiment: steering vectors, the
// configured RIS and the derived second-order statistics.
struct LinkModel {
  SteeringVector a_t;        // m_t
  SteeringVector a_r;        // m_r
  SteeringVector a_ris_in;   // a_RIS(phi_H, theta_H)
  SteeringVector a_ris_out;  // a_RIS(phi_r, theta_r)
  RisState ris;
  CascadeStats stats;
  CMatrix h_los;  // a_ris_in a_t^H
  CMatrix g_los;  // a_r a_ris_out^H
};

inline LinkModel build_link(const SimConfig& cfg) {
  cfg.validate();
  LinkModel m;
  m.a_t = ura_steering(cfg.tx, cfg.tx_angle);
  m.a_r = ula_steering(cfg.rx, cfg.rx_angle);
  m.a_ris_in = ura_steering(cfg.ris, cfg.ris_in);
  m.a_ris_out = ura_steering(cfg.ris, cfg.ris_out);
  m.ris = build_ris_state(cfg.policy, cfg.amplitude, m.a_ris_out, m.a_ris_in,
                          derive_seed(cfg.seed, StreamDomain::ris_phases));
  m.stats = make_cascade_stats(cfg.hop_h, cfg.hop_g, m.ris, m.a_t, m.a_r);
  m.h_los = m.a_ris_in.entries * m.a_t.entries.adjoint();
  m.g_los = m.a_r.entries * m.a_ris_out.entries.adjoint();
  return m;
}

inline QuadFormSpec analytic_quadform(const LinkModel& link) {
  return quadform_spec(link.stats, link.a_r.size());
}

// ---------------------------------------------------------------------------
// Channel draws

inline void sample_hop_h(const LinkModel& link, const SimConfig& cfg, TrialRng& rng,
                         ComplexGaussian& gauss, CMatrix& out) {
  const double los = cfg.deterministic_los ? 1.0 : cfg.hop_h.los_gain();
  out = los * link.h_los;
  if (cfg.deterministic_los) return;
  const double nlos = cfg.hop_h.nlos_gain();
  for (Eigen::Index c = 0; c < out.cols(); ++c)
    for (Eigen::Index r = 0; r < out.rows(); ++r) out(r, c) += nlos * gauss(rng, cfg.hop_h.nlos_variance);
}

inline void sample_hop_g(const LinkModel& link, const SimConfig& cfg, TrialRng& rng,
                         ComplexGaussian& gauss, CMatrix& out) {
  const double los = cfg.deterministic_los ? 1.0 : cfg.hop_g.los_gain();
  out = los * link.g_los;
  if (cfg.deterministic_los) return;
  const double nlos = cfg.hop_g.nlos_gain();
  for (Eigen::Index c = 0; c < out.cols(); ++c)
    for (Eigen::Index r = 0; r < out.rows(); ++r) out(r, c) += nlos * gauss(rng, cfg.hop_g.nlos_variance);
}

inline CMatrix sample_hop_h(const LinkModel& link, const SimConfig& cfg, TrialRng& rng) {
  ComplexGaussian gauss;
  CMatrix h;
  sample_hop_h(link, cfg, rng, gauss, h);
  return h;
}

inline CMatrix sample_hop_g(const LinkModel& link, const SimConfig& cfg, TrialRng& rng) {
  ComplexGaussian gauss;
  CMatrix g;
  sample_hop_g(link, cfg, rng, gauss, g);
  return g;
}

// Draws H and G for one trial and forms F = G * Phi * H.
class CascadeSampler {
 public:
  CascadeSampler(const LinkModel& link, const SimConfig& cfg) : link_(link), cfg_(cfg) {}

  const CMatrix& draw(std::uint64_t trial) {
    TrialRng rng(cfg_.seed, StreamDomain::channel, trial);
    ComplexGaussian gauss;
    sample_hop_h(link_, cfg_, rng, gauss, h_);
    sample_hop_g(link_, cfg_, rng, gauss, g_);
    gphi_ = g_ * link_.ris.reflection.asDiagonal();
    f_.noalias() = gphi_ * h_;
    return f_;
  }

 private:
  const LinkModel& link_;
  const SimConfig& cfg_;
  CMatrix h_, g_, gphi_, f_;
};

struct PowerIterationResult {
  double gain = 0.0;  // ||F v||^2 for the final unit vector v
  int iterations = 0;
  bool converged = false;
};

// Dominant eigenpair of F^H F from a fixed start vector. The Rayleigh quotient
// of successive iterates is nondecreasing, so the result never falls below
// the start vector's gain.
inline PowerIterationResult dominant_gain(const CMatrix& f, const CVector& start, double rtol = 1e-10,
                                          int max_iterations = 20000) {
  const CMatrix a = f.adjoint() * f;
  CVector v = start.normalized();
  double rq = std::real(v.dot(a * v));
  PowerIterationResult res;
  for (int it = 1; it <= max_iterations; ++it) {
    CVector y = a * v;
    const double ny = y.norm();
    if (ny == 0.0) {
      res = {0.0, it, true};
      return res;
    }
    v = y / ny;
    const double next = std::real(v.dot(a * v));
    res.iterations = it;
    if (std::abs(next - rq) <= rtol * std::abs(next)) {
      res.gain = std::max(next, rq);
      res.converged = true;
      return res;
    }
    rq = std::max(rq, next);
  }
  res.gain = rq;
  return res;
}

struct LinkSamples {
  std::vector<double> los;        // ||F m_t||^2 / ||m_t||^2 per trial
  std::vector<double> benchmark;  // dominant singular value squared (empty if not requested)
  std::size_t power_iteration_failures = 0;
};

// Raw per-trial channel gains in trial order (rho = rho_bar * gain).
inline LinkSamples simulate_link(const SimConfig& cfg, bool with_benchmark) {
  const LinkModel link = build_link(cfg);
  const CVector w = link.a_t.entries.normalized();
  LinkSamples out;
  out.los.resize(cfg.trials);
  if (with_benchmark) out.benchmark.resize(cfg.trials);
  const std::size_t blocks = (cfg.trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<std::size_t> failures(blocks, 0);

  for_each_block(cfg.trials, cfg.threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
    CascadeSampler sampler(link, cfg);
    for (std::size_t t = begin; t < end; ++t) {
      const CMatrix& f = sampler.draw(t);
      out.los[t] = (f * w).squaredNorm();
      if (with_benchmark) {
        const auto pi = dominant_gain(f, w);
        if (!pi.converged) ++failures[b];
        out.benchmark[t] = pi.gain;
      }
    }
  });
  for (auto n : failures) out.power_iteration_failures += n;
  return out;
}

// Samples of rho = rho_bar * ||F w||^2 for the configured precoder.
inline EmpiricalDistribution simulate_snr(const SimConfig& cfg) {
  const bool bench = cfg.precoder == Precoder::max_eigenvector;
  LinkSamples s = simulate_link(cfg, bench);
  std::vector<double>& v = bench ? s.benchmark : s.los;
  for (double& x : v) x *= cfg.rho_bar;
  return make_empirical(std::move(v), cfg.seed, s.power_iteration_failures);
}

struct CovarianceEstimate {
  CMatrix mean;           // (1/n) sum z z^H
  Eigen::MatrixXd se_re;  // standard error of the real part of each entry
  Eigen::MatrixXd se_im;
  std::size_t trials = 0;
};

// Sample covariance of z = (F - M) w under the LoS-aligned precoder.
inline CovarianceEstimate empirical_covariance_z(const SimConfig& cfg, std::size_t trials) {
  const LinkModel link = build_link(cfg);
  const CVector w = link.a_t.entries.normalized();
  const CVector mean_part = mean_channel(link.stats) * w;
  const auto nr = static_cast<Eigen::Index>(cfg.n_r());
  const std::size_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;

  struct Partial {
    CMatrix sum;
    Eigen::MatrixXd sq_re, sq_im;
  };
  std::vector<Partial> partial(blocks);
  for_each_block(trials, cfg.threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
    CascadeSampler sampler(link, cfg);
    Partial p{CMatrix::Zero(nr, nr), Eigen::MatrixXd::Zero(nr, nr), Eigen::MatrixXd::Zero(nr, nr)};
    for (std::size_t t = begin; t < end; ++t) {
      const CVector z = sampler.draw(t) * w - mean_part;
      const CMatrix zz = z * z.adjoint();
      p.sum += zz;
      p.sq_re += zz.real().cwiseAbs2();
      p.sq_im += zz.imag().cwiseAbs2();
    }
    partial[b] = std::move(p);
  });

  CMatrix sum = CMatrix::Zero(nr, nr);
  Eigen::MatrixXd sq_re = Eigen::MatrixXd::Zero(nr, nr), sq_im = Eigen::MatrixXd::Zero(nr, nr);
  for (const auto& p : partial) {
    sum += p.sum;
    sq_re += p.sq_re;
    sq_im += p.sq_im;
  }
  const double n = static_cast<double>(trials);
  CovarianceEstimate est;
  est.trials = trials;
  est.mean = sum / n;
  const Eigen::MatrixXd var_re = (sq_re / n - est.mean.real().cwiseAbs2()) * (n / (n - 1.0));
  const Eigen::MatrixXd var_im = (sq_im / n - est.mean.imag().cwiseAbs2()) * (n / (n - 1.0));
  est.se_re = (var_re.cwiseMax(0.0) / n).cwiseSqrt();
  est.se_im = (var_im.cwiseMax(0.0) / n).cwiseSqrt();
  return est;
}

// Samples of a single cascaded entry f_{r,t}, for CLT checks.
inline std::vector<cd> sample_cascaded_entry(const SimConfig& cfg, std::size_t r, std::size_t t,
                                             std::size_t trials) {
  const LinkModel link = build_link(cfg);
  std::vector<cd> out(trials);
  for_each_block(trials, cfg.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    CascadeSampler sampler(link, cfg);
    for (std::size_t i = begin; i < end; ++i)
      out[i] = sampler.draw(i)(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t));
  });
  return out;
}

// Q = sum_i |mu_i + z_i|^2 with mu_i = sqrt(noncentrality_i) and z_i ~ CN(0, lambda_i).
inline EmpiricalDistribution sample_quadform(const QuadFormSpec& spec, std::size_t trials,
                                             std::uint64_t seed, unsigned threads = 1) {
  spec.validate();
  std::vector<double> mu(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) mu[i] = std::sqrt(spec.noncentralities[i]);
  std::vector<double> out(trials);
  for_each_block(trials, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      TrialRng rng(seed, StreamDomain::quadform, t);
      ComplexGaussian gauss;
      double q = 0.0;
      for (std::size_t i = 0; i < spec.size(); ++i) q += std::norm(mu[i] + gauss(rng, spec.lambdas[i]));
      out[t] = q;
    }
  });
  return make_empirical(std::move(out), seed);
}

// ---------------------------------------------------------------------------
// Gil-Pelaez inversion

struct GilPelaezOptions {
  double abs_tol = 1e-6;
  std::size_t max_panels = 5'000'000;
};

// Characteristic function E[exp(j t Q)] = M_Q(j t).
inline cd characteristic_function(const QuadFormSpec& spec, double t) {
  cd log_phi{0.0, 0.0};
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const cd x{1.0, -t * spec.lambdas[i]};
    log_phi += -std::log(x) + cd{0.0, t * spec.noncentralities[i]} / x;
  }
  return std::exp(log_phi);
}

// F(q) = 1/2 - (1/pi) int_0^inf Im[phi(t) e^{-j t q}] / t dt.
//
// The integral runs over panels no wider than half an oscillation of the
// integrand; the phase of phi grows no faster than E[Q]. Integration stops
// once |phi| < 1e-12, or, in the algebraic tail (t >> 1/lambda_min), once the
// remainder after a one-term integration-by-parts tail correction is below
// the tolerance.
inline double gil_pelaez_cdf(const QuadFormSpec& spec, double q, const GilPelaezOptions& opt = {}) {
  spec.validate();
  if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument("Gil-Pelaez CDF needs q > 0");
  using boost::math::quadrature::gauss_kronrod;

  const double mean = spec.mean();
  const double lambda_min = *std::min_element(spec.lambdas.begin(), spec.lambdas.end());
  const double h = std::numbers::pi / (q + mean);
  const double n_terms = static_cast<double>(spec.size());
  auto integrand = [&](double t) {
    return std::imag(characteristic_function(spec, t) * std::polar(1.0, -t * q)) / t;
  };

  double integral = 0.0;
  double tail = 0.0;
  bool done = false;
  for (std::size_t k = 0; k < opt.max_panels; ++k) {
    const double a = static_cast<double>(k) * h;
    const double b = a + h;
    double err = 0.0;
    integral += gauss_kronrod<double, 15>::integrate(integrand, a, b, 3, 1e-9, &err);

    const cd phi = characteristic_function(spec, b);
    const double env = std::abs(phi);
    if (env < 1e-12) {
      done = true;
      break;
    }
    if (b * lambda_min > 10.0) {
      const double remainder = (n_terms + 2.0) * env / (b * b * q * q);
      if (remainder < 1e-3 * opt.abs_tol) {
        tail = std::imag(phi * std::polar(1.0, -q * b) / cd{0.0, b * q});
        done = true;
        break;
      }
    }
  }
  if (!done) throw OracleError("Gil-Pelaez quadrature did not reach its truncation point");
  return std::clamp(0.5 - (integral + tail) / std::numbers::pi, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Raw sample files: a text header terminated by "end_header\n", followed by
// `count` little-endian IEEE-754 doubles.

struct SampleFile {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<double> values;
};

inline void write_sample_file(const std::filesystem::path& path, const std::vector<double>& values,
                              const std::string& config_hash, std::uint64_t seed) {
  std::ostringstream header;
  header << "rissnr-samples 1\n"
         << "config_hash " << config_hash << "\n"
         << "seed " << seed << "\n"
         << "count " << values.size() << "\n"
         << "end_header\n";
  const std::string h = header.str();
  std::string body(values.size() * 8, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int byte = 0; byte < 8; ++byte)
      body[i * 8 + static_cast<std::size_t>(byte)] = static_cast<char>((bits >> (8 * byte)) & 0xFF);
  }
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os.write(h.data(), static_cast<std::streamsize>(h.size()));
    os.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!os) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline SampleFile read_sample_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  SampleFile f;
  std::string line;
  std::size_t count = 0;
  bool magic = false, ended = false;
  while (std::getline(is, line)) {
    if (!magic) {
      if (line != "rissnr-samples 1") throw std::runtime_error(path.string() + ": not a sample file");
      magic = true;
      continue;
    }
    if (line == "end_header") {
      ended = true;
      break;
    }
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "config_hash") ls >> f.config_hash;
    else if (key == "seed") ls >> f.seed;
    else if (key == "count") ls >> count;
  }
  if (!ended) throw std::runtime_error(path.string() + ": truncated header");
  std::string body(count * 8, '\0');
  is.read(body.data(), static_cast<std::streamsize>(body.size()));
  if (static_cast<std::size_t>(is.gcount()) != body.size())
    throw std::runtime_error(path.string() + ": truncated sample payload");
  f.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int byte = 0; byte < 8; ++byte)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(body[i * 8 + static_cast<std::size_t>(byte)]))
              << (8 * byte);
    f.values[i] = std::bit_cast<double>(bits);
  }
  return f;
}

}  // namespace rissnr
