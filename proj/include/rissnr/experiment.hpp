#pragma once

// Configuration-driven experiments: outage sweeps (SPA vs channel-level Monte
// Carlo vs the max-eigenvector benchmark), distribution reports on a q grid,
// CSV I/O and matplotlib script generation.

#include "rissnr/chanstats.hpp"
#include "rissnr/montecarlo.hpp"
#include "rissnr/spa.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rissnr {

using json = nlohmann::json;

enum class SweepVariable { rho_bar_db, n_ris, bits };

inline std::string_view to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::rho_bar_db: return "rho_bar_db";
    case SweepVariable::n_ris: return "n_ris";
    case SweepVariable::bits: return "bits";
  }
  return "?";
}

inline SweepVariable parse_sweep_variable(std::string_view s) {
  if (s == "rho_bar_db") return SweepVariable::rho_bar_db;
  if (s == "n_ris") return SweepVariable::n_ris;
  if (s == "bits") return SweepVariable::bits;
  throw std::invalid_argument("unknown sweep variable '" + std::string(s) + "'");
}

struct SweepSpec {
  SweepVariable variable = SweepVariable::rho_bar_db;
  std::vector<double> values;

  // Inclusive arithmetic range; a step of zero or start == stop gives one point.
  static SweepSpec range(SweepVariable var, double start, double stop, double step) {
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
      throw std::invalid_argument("sweep bounds must be finite");
    SweepSpec s{var, {}};
    if (start == stop || step == 0.0) {
      s.values.push_back(start);
      return s;
    }
    if ((stop - start) / step < 0.0) throw std::invalid_argument("sweep step points away from stop");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) s.values.push_back(start + static_cast<double>(i) * step);
    return s;
  }

  void validate() const {
    if (values.empty()) throw std::invalid_argument("sweep has no points");
    for (double v : values) {
      if (!std::isfinite(v)) throw std::invalid_argument("sweep values must be finite");
      if (variable != SweepVariable::rho_bar_db && (v < 1.0 || v != std::floor(v)))
        throw std::invalid_argument("n_ris and bits sweeps need positive integer values");
      if (variable == SweepVariable::bits && v > 30.0)
        throw std::invalid_argument("bits sweep limited to 30");
    }
  }
};

// "var:start:stop:step" as accepted by --sweep.
inline SweepSpec parse_sweep_flag(const std::string& flag) {
  std::vector<std::string> parts;
  std::stringstream ss(flag);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 4) throw std::invalid_argument("--sweep expects var:start:stop:step");
  try {
    return SweepSpec::range(parse_sweep_variable(parts[0]), std::stod(parts[1]), std::stod(parts[2]),
                            std::stod(parts[3]));
  } catch (const std::logic_error& e) {
    throw std::invalid_argument(std::string("bad --sweep value: ") + e.what());
  }
}

struct AnalysisToggles {
  bool spa = true;
  bool monte_carlo = true;
  bool gil_pelaez = true;
  bool benchmark = true;
};

struct ExperimentConfig {
  std::string scenario = "optimum-phase";
  double carrier_frequency_hz = 3.6e9;  // metadata; spacings are in wavelengths
  SimConfig sim{};
  double rho_th = 15.0;
  double rho_bar_db = -37.0;  // operating point for n_ris / bits sweeps
  SweepSpec sweep = SweepSpec::range(SweepVariable::rho_bar_db, -38.0, -35.0, 0.1);
  AnalysisToggles analysis{};
  std::size_t grid_points = 200;
  std::string output_dir = "out";

  void validate() const {
    sim.validate();
    sweep.validate();
    if (!(rho_th > 0.0)) throw std::invalid_argument("outage threshold must be positive");
    if (!std::isfinite(rho_bar_db)) throw std::invalid_argument("rho_bar_db must be finite");
    if (grid_points < 2) throw std::invalid_argument("distribution grid needs at least two points");
  }
};

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline double deg(double d) { return d * std::numbers::pi / 180.0; }
inline double to_deg(double r) { return r * 180.0 / std::numbers::pi; }

inline json angle_json(const AnglePair& a) { return json::array({to_deg(a.azimuth), to_deg(a.elevation)}); }

inline AnglePair angle_from(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument(std::string(key) + " must be [azimuth_deg, elevation_deg]");
  return {deg(j[0].get<double>()), deg(j[1].get<double>())};
}

inline UraGeometry ura_from(const json& arrays, const char* count_key, const char* shape_key,
                            std::size_t default_count, double spacing) {
  if (arrays.contains(shape_key) && !arrays[shape_key].is_null()) {
    const auto& sh = arrays[shape_key];
    if (!sh.is_array() || sh.size() != 2) throw std::invalid_argument(std::string(shape_key) + " must be [n_x, n_y]");
    UraGeometry g{sh[0].get<std::size_t>(), sh[1].get<std::size_t>(), spacing, spacing};
    if (arrays.contains(count_key) && arrays[count_key].get<std::size_t>() != g.size())
      throw std::invalid_argument(std::string(shape_key) + " does not multiply to " + count_key);
    return g;
  }
  return square_ura(arrays.value(count_key, default_count), spacing);
}

}  // namespace detail

// Missing keys take the defaults of ExperimentConfig. Unknown top-level keys
// are rejected so typos do not silently fall back to defaults.
inline ExperimentConfig config_from_json(const json& j) {
  static const std::vector<std::string> known = {
      "scenario", "carrier_frequency_hz", "arrays", "channel", "ris", "angles_deg", "rho_th",
      "rho_bar_db", "simulation", "sweep", "analysis", "grid_points", "output_dir"};
  if (!j.is_object()) throw std::invalid_argument("configuration must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("unknown configuration key '" + key + "'");

  ExperimentConfig c;
  try {
    c.scenario = j.value("scenario", c.scenario);
    c.carrier_frequency_hz = j.value("carrier_frequency_hz", c.carrier_frequency_hz);

    const json arrays = j.value("arrays", json::object());
    const double spacing = arrays.value("spacing_wavelengths", 0.5);
    c.sim.tx = detail::ura_from(arrays, "n_t", "tx_shape", 4, spacing);
    c.sim.ris = detail::ura_from(arrays, "n_ris", "ris_shape", 100, spacing);
    c.sim.rx = UlaGeometry{arrays.value("n_r", std::size_t{4}), spacing};

    const json ch = j.value("channel", json::object());
    c.sim.hop_h = {ch.value("k_h", c.sim.hop_h.k_factor), ch.value("sigma2_h", 1.0)};
    c.sim.hop_g = {ch.value("k_g", c.sim.hop_g.k_factor), ch.value("sigma2_g", 1.0)};

    const json ris = j.value("ris", json::object());
    c.sim.policy.mode = parse_phase_mode(ris.value("policy", std::string("optimal-discrete")));
    if (ris.contains("bits")) {
      const auto& b = ris["bits"];
      if (b.is_null() || (b.is_string() && b.get<std::string>() == "continuous")) c.sim.policy.bits.reset();
      else c.sim.policy.bits = b.get<int>();
    }
    c.sim.policy.circular_quantization = ris.value("circular_quantization", true);
    c.sim.amplitude.zeta_min = ris.value("zeta_min", c.sim.amplitude.zeta_min);
    c.sim.amplitude.c = ris.value("c_over_pi", 0.43) * std::numbers::pi;
    c.sim.amplitude.k = ris.value("k", c.sim.amplitude.k);

    // The transmit direction follows the T->RIS angles and the receive angle
    // follows the RIS->R elevation unless given explicitly.
    const json ang = j.value("angles_deg", json::object());
    if (ang.contains("ris_in")) c.sim.ris_in = detail::angle_from(ang["ris_in"], "ris_in");
    if (ang.contains("ris_out")) c.sim.ris_out = detail::angle_from(ang["ris_out"], "ris_out");
    c.sim.tx_angle = (ang.contains("tx") && !ang["tx"].is_null()) ? detail::angle_from(ang["tx"], "tx") : c.sim.ris_in;
    c.sim.rx_angle = (ang.contains("rx") && !ang["rx"].is_null()) ? detail::deg(ang["rx"].get<double>())
                                                                 : c.sim.ris_out.elevation;

    c.rho_th = j.value("rho_th", c.rho_th);
    c.rho_bar_db = j.value("rho_bar_db", c.rho_bar_db);

    const json sim = j.value("simulation", json::object());
    c.sim.trials = sim.value("trials", c.sim.trials);
    c.sim.seed = sim.value("seed", c.sim.seed);
    c.sim.threads = sim.value("threads", c.sim.threads);

    if (j.contains("sweep")) {
      const json& sw = j["sweep"];
      const auto var = parse_sweep_variable(sw.value("variable", std::string("rho_bar_db")));
      if (sw.contains("values")) c.sweep = {var, sw["values"].get<std::vector<double>>()};
      else c.sweep = SweepSpec::range(var, sw.at("start").get<double>(), sw.at("stop").get<double>(),
                                      sw.value("step", 1.0));
    }

    const json an = j.value("analysis", json::object());
    c.analysis.spa = an.value("spa", true);
    c.analysis.monte_carlo = an.value("monte_carlo", true);
    c.analysis.gil_pelaez = an.value("gil_pelaez", true);
    c.analysis.benchmark = an.value("benchmark", true);

    c.grid_points = j.value("grid_points", c.grid_points);
    c.output_dir = j.value("output_dir", c.output_dir);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("configuration: ") + e.what());
  }
  c.validate();
  return c;
}

// Fully resolved configuration, every field explicit.
inline json to_json(const ExperimentConfig& c) {
  json j;
  j["scenario"] = c.scenario;
  j["carrier_frequency_hz"] = c.carrier_frequency_hz;
  j["arrays"] = {{"n_t", c.sim.n_t()},
                 {"tx_shape", {c.sim.tx.n_x, c.sim.tx.n_y}},
                 {"n_r", c.sim.n_r()},
                 {"n_ris", c.sim.n_ris()},
                 {"ris_shape", {c.sim.ris.n_x, c.sim.ris.n_y}},
                 {"spacing_wavelengths", c.sim.rx.spacing}};
  j["channel"] = {{"k_h", c.sim.hop_h.k_factor},
                  {"k_g", c.sim.hop_g.k_factor},
                  {"sigma2_h", c.sim.hop_h.nlos_variance},
                  {"sigma2_g", c.sim.hop_g.nlos_variance}};
  j["ris"] = {{"policy", std::string(to_string(c.sim.policy.mode))},
              {"bits", c.sim.policy.bits ? json(*c.sim.policy.bits) : json("continuous")},
              {"circular_quantization", c.sim.policy.circular_quantization},
              {"zeta_min", c.sim.amplitude.zeta_min},
              {"c_over_pi", c.sim.amplitude.c / std::numbers::pi},
              {"k", c.sim.amplitude.k}};
  j["angles_deg"] = {{"ris_in", detail::angle_json(c.sim.ris_in)},
                     {"ris_out", detail::angle_json(c.sim.ris_out)},
                     {"tx", detail::angle_json(c.sim.tx_angle)},
                     {"rx", detail::to_deg(c.sim.rx_angle)}};
  j["rho_th"] = c.rho_th;
  j["rho_bar_db"] = c.rho_bar_db;
  j["simulation"] = {{"trials", c.sim.trials}, {"seed", c.sim.seed}, {"threads", c.sim.threads}};
  j["sweep"] = {{"variable", std::string(to_string(c.sweep.variable))}, {"values", c.sweep.values}};
  j["analysis"] = {{"spa", c.analysis.spa},
                   {"monte_carlo", c.analysis.monte_carlo},
                   {"gil_pelaez", c.analysis.gil_pelaez},
                   {"benchmark", c.analysis.benchmark}};
  j["grid_points"] = c.grid_points;
  j["output_dir"] = c.output_dir;
  return j;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Hash of everything that affects numbers; output location and worker count excluded.
inline std::string config_hash(const ExperimentConfig& c) {
  json j = to_json(c);
  j.erase("output_dir");
  j["simulation"].erase("threads");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open configuration " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

// Link configuration at one sweep point.
inline SimConfig sim_at(const ExperimentConfig& c, double sweep_value) {
  SimConfig s = c.sim;
  switch (c.sweep.variable) {
    case SweepVariable::rho_bar_db: s.rho_bar = db_to_linear(sweep_value); break;
    case SweepVariable::n_ris:
      s.ris = square_ura(static_cast<std::size_t>(sweep_value), c.sim.ris.spacing_x);
      s.rho_bar = db_to_linear(c.rho_bar_db);
      break;
    case SweepVariable::bits:
      s.policy.bits = static_cast<int>(sweep_value);
      s.rho_bar = db_to_linear(c.rho_bar_db);
      break;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Outage sweep

struct OutageRow {
  double sweep_value = 0.0;
  std::optional<double> p_out_spa;
  std::optional<double> p_out_mc;
  std::optional<double> mc_stderr;
  std::optional<double> p_out_benchmark_mc;
  std::string status = "ok";
};

struct OutageTable {
  std::string config_hash;
  std::string scenario;
  SweepVariable variable = SweepVariable::rho_bar_db;
  std::vector<OutageRow> rows;
};

namespace detail {

inline double fraction_below(const std::vector<double>& sorted, double x) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

struct McGains {
  std::vector<double> los;  // sorted
  std::vector<double> benchmark;
  std::size_t failures = 0;
};

inline McGains run_mc(const SimConfig& s, bool benchmark) {
  LinkSamples ls = simulate_link(s, benchmark);
  std::sort(ls.los.begin(), ls.los.end());
  std::sort(ls.benchmark.begin(), ls.benchmark.end());
  return {std::move(ls.los), std::move(ls.benchmark), ls.power_iteration_failures};
}

inline void fill_row(OutageRow& row, const ExperimentConfig& c, const std::optional<QuadFormSpec>& spec,
                     const McGains* mc, double rho_bar) {
  const double q = c.rho_th / rho_bar;
  if (spec) row.p_out_spa = cdf(*spec, q).value;
  if (mc) {
    const double p = fraction_below(mc->los, q);
    row.p_out_mc = p;
    row.mc_stderr = std::sqrt(p * (1.0 - p) / static_cast<double>(mc->los.size()));
    if (!mc->benchmark.empty()) row.p_out_benchmark_mc = fraction_below(mc->benchmark, q);
    if (mc->failures > 0) row.status = "ok; power-iteration-failures=" + std::to_string(mc->failures);
  }
}

}  // namespace detail

inline OutageTable run_outage_sweep(const ExperimentConfig& c) {
  c.validate();
  OutageTable table{config_hash(c), c.scenario, c.sweep.variable, {}};
  const bool bench = c.analysis.monte_carlo && c.analysis.benchmark;

  if (c.sweep.variable == SweepVariable::rho_bar_db) {
    // One channel realisation set serves every rho_bar because rho scales linearly.
    SimConfig s = c.sim;
    s.rho_bar = 1.0;
    std::optional<QuadFormSpec> spec;
    std::string spec_error;
    if (c.analysis.spa) {
      try {
        spec = analytic_quadform(build_link(s));
      } catch (const std::exception& e) {
        spec_error = e.what();
      }
    }
    std::optional<detail::McGains> mc;
    if (c.analysis.monte_carlo) mc = detail::run_mc(s, bench);
    for (double v : c.sweep.values) {
      OutageRow row;
      row.sweep_value = v;
      try {
        detail::fill_row(row, c, spec, mc ? &*mc : nullptr, db_to_linear(v));
        if (!spec_error.empty()) row.status = "spa-error: " + spec_error;
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
      table.rows.push_back(std::move(row));
    }
    return table;
  }

  for (double v : c.sweep.values) {
    OutageRow row;
    row.sweep_value = v;
    try {
      const SimConfig s = sim_at(c, v);
      std::optional<QuadFormSpec> spec;
      if (c.analysis.spa) spec = analytic_quadform(build_link(s));
      std::optional<detail::McGains> mc;
      if (c.analysis.monte_carlo) {
        SimConfig unit = s;
        unit.rho_bar = 1.0;
        mc = detail::run_mc(unit, bench);
      }
      detail::fill_row(row, c, spec, mc ? &*mc : nullptr, s.rho_bar);
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Distribution report

struct DistributionRow {
  double q = 0.0;
  std::optional<double> pdf_spa;
  std::optional<double> cdf_spa;
  std::optional<double> cdf_gil_pelaez;
  std::optional<double> cdf_empirical;   // direct samples of the Gaussian quadratic form
  std::optional<double> cdf_channel_mc;  // full channel simulation, LoS-aligned precoder
};

struct DistributionTable {
  std::string config_hash;
  std::string scenario;
  std::vector<DistributionRow> rows;
};

// `points` values spanning mean +/- 6 standard deviations, clipped to q > 0.
inline std::vector<double> default_q_grid(const QuadFormSpec& spec, std::size_t points) {
  const double mean = spec.mean();
  const double sd = std::sqrt(spec.variance());
  const double lo = std::max(mean - 6.0 * sd, 1e-3 * std::min(sd, mean));
  const double hi = mean + 6.0 * sd;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

inline DistributionTable run_distribution_report(const ExperimentConfig& c,
                                                 std::optional<std::vector<double>> grid = std::nullopt) {
  c.validate();
  SimConfig s = c.sim;
  s.rho_bar = 1.0;
  const QuadFormSpec spec = analytic_quadform(build_link(s));
  const std::vector<double> qs = grid ? *grid : default_q_grid(spec, c.grid_points);

  std::optional<EmpiricalDistribution> direct;
  std::optional<detail::McGains> channel;
  if (c.analysis.monte_carlo) {
    direct = sample_quadform(spec, c.sim.trials, c.sim.seed, c.sim.threads);
    channel = detail::run_mc(s, false);
  }

  DistributionTable table{config_hash(c), c.scenario, {}};
  for (double q : qs) {
    DistributionRow row;
    row.q = q;
    if (c.analysis.spa) {
      row.pdf_spa = pdf(spec, q).value;
      row.cdf_spa = cdf(spec, q).value;
    }
    if (c.analysis.gil_pelaez) row.cdf_gil_pelaez = gil_pelaez_cdf(spec, q);
    if (direct) row.cdf_empirical = direct->cdf(q);
    if (channel) row.cdf_channel_mc = detail::fraction_below(channel->los, q);
    table.rows.push_back(row);
  }
  return table;
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

inline std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

inline std::string sweep_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace detail

inline std::string to_csv(const OutageTable& t) {
  std::ostringstream os;
  os << "config_hash,scenario,sweep_variable,sweep_value,p_out_spa,p_out_mc,mc_stderr,p_out_benchmark_mc,status\r\n";
  for (const auto& r : t.rows) {
    os << t.config_hash << ',' << detail::csv_field(t.scenario) << ',' << to_string(t.variable) << ','
       << detail::sweep_num(r.sweep_value) << ',' << detail::num(r.p_out_spa) << ',' << detail::num(r.p_out_mc)
       << ',' << detail::num(r.mc_stderr) << ',' << detail::num(r.p_out_benchmark_mc) << ','
       << detail::csv_field(r.status) << "\r\n";
  }
  return os.str();
}

inline std::string to_csv(const DistributionTable& t) {
  std::ostringstream os;
  os << "config_hash,scenario,q,pdf_spa,cdf_spa,cdf_gil_pelaez,cdf_empirical,cdf_channel_mc\r\n";
  for (const auto& r : t.rows) {
    os << t.config_hash << ',' << detail::csv_field(t.scenario) << ',' << detail::num(r.q) << ','
       << detail::num(r.pdf_spa) << ',' << detail::num(r.cdf_spa) << ',' << detail::num(r.cdf_gil_pelaez) << ','
       << detail::num(r.cdf_empirical) << ',' << detail::num(r.cdf_channel_mc) << "\r\n";
  }
  return os.str();
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("CSV has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

inline CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      rec.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        rec.push_back(std::move(field));
        records.push_back(std::move(rec));
      }
      rec.clear();
      field.clear();
      any = false;
    } else {
      field += ch;
      any = true;
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quoted CSV field");
  if (any || !field.empty()) {
    rec.push_back(std::move(field));
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw std::invalid_argument("empty CSV");
  CsvTable t;
  t.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size()) throw std::invalid_argument("CSV row width differs from header");
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::invalid_argument("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Temp file in the target directory, then rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os << content;
    if (!os) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// Outage series read back from a sweep CSV; rejects files mixing configurations.
struct OutageSeries {
  std::string config_hash;
  std::string scenario;
  std::string sweep_variable;
  std::vector<double> x;
  std::vector<std::optional<double>> spa, mc, benchmark;
};

inline OutageSeries read_outage_csv(const std::filesystem::path& path) {
  const CsvTable t = parse_csv(read_text(path));
  const auto c_hash = t.column("config_hash"), c_scen = t.column("scenario"), c_var = t.column("sweep_variable"),
             c_x = t.column("sweep_value"), c_spa = t.column("p_out_spa"), c_mc = t.column("p_out_mc"),
             c_b = t.column("p_out_benchmark_mc");
  OutageSeries s;
  auto opt = [](const std::string& f) -> std::optional<double> {
    if (f.empty()) return std::nullopt;
    return std::stod(f);
  };
  for (const auto& r : t.rows) {
    if (s.config_hash.empty()) {
      s.config_hash = r[c_hash];
      s.scenario = r[c_scen];
      s.sweep_variable = r[c_var];
    } else if (r[c_hash] != s.config_hash) {
      throw std::invalid_argument(path.string() + ": rows from different configurations (" + s.config_hash +
                                  " vs " + r[c_hash] + ")");
    }
    s.x.push_back(std::stod(r[c_x]));
    s.spa.push_back(opt(r[c_spa]));
    s.mc.push_back(opt(r[c_mc]));
    s.benchmark.push_back(opt(r[c_b]));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Plot script

struct PlotStyle {
  std::string title;
  std::string image = "outage.png";
  std::vector<std::string> labels;  // one per CSV; defaults to the scenario name
};

// Self-contained matplotlib script with the data embedded: solid lines for the
// SPA, hollow markers for Monte Carlo, dashed filled markers for the benchmark.
inline std::string emit_plot_script(const std::vector<std::filesystem::path>& csvs, const PlotStyle& style) {
  if (csvs.empty()) throw std::invalid_argument("no CSV files to plot");
  auto py_list = [](const std::vector<double>& xs, const std::vector<std::optional<double>>& ys) {
    std::ostringstream a, b;
    a << '[';
    b << '[';
    bool first = true;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!ys[i] || !(*ys[i] > 0.0)) continue;  // log axis
      if (!first) {
        a << ", ";
        b << ", ";
      }
      first = false;
      a << detail::num(xs[i]);
      b << detail::num(*ys[i]);
    }
    a << ']';
    b << ']';
    return std::make_pair(a.str(), b.str());
  };
  auto py_str = [](const std::string& s) {
    std::string out = "'";
    for (char ch : s) {
      if (ch == '\\' || ch == '\'') out += '\\';
      out += ch;
    }
    return out + "'";
  };

  std::ostringstream py;
  py << "#!/usr/bin/env python3\n"
     << "# Generated by rissnr. Outage probability, analysis (lines) vs simulation (markers).\n"
     << "import matplotlib\n"
     << "matplotlib.use('Agg')\n"
     << "import matplotlib.pyplot as plt\n\n"
     << "fig, ax = plt.subplots(figsize=(5.0, 4.0))\n"
     << "colors = plt.rcParams['axes.prop_cycle'].by_key()['color']\n";
  std::string xlabel;
  for (std::size_t i = 0; i < csvs.size(); ++i) {
    if (!std::filesystem::exists(csvs[i])) throw std::invalid_argument("missing CSV " + csvs[i].string());
    const OutageSeries s = read_outage_csv(csvs[i]);
    const std::string label = i < style.labels.size() ? style.labels[i] : s.scenario;
    const std::string this_xlabel = s.sweep_variable == "rho_bar_db" ? "Average SNR $\\\\bar{\\\\rho}$ (dB)"
                                    : s.sweep_variable == "n_ris"  ? "$N_{RIS}$"
                                                                   : "Phase resolution b (bits)";
    if (xlabel.empty()) xlabel = this_xlabel;
    const auto [xs_spa, ys_spa] = py_list(s.x, s.spa);
    const auto [xs_mc, ys_mc] = py_list(s.x, s.mc);
    const auto [xs_b, ys_b] = py_list(s.x, s.benchmark);
    py << "\n# " << csvs[i].filename().string() << " (config " << s.config_hash << ")\n"
       << "c = colors[" << i << " % len(colors)]\n"
       << "ax.semilogy(" << xs_spa << ", " << ys_spa << ", '-', color=c, label=" << py_str(label + " (SPA)") << ")\n"
       << "ax.semilogy(" << xs_mc << ", " << ys_mc << ", 'o', mfc='none', color=c, label=" << py_str(label + " (MC)")
       << ")\n"
       << "ax.semilogy(" << xs_b << ", " << ys_b << ", '^--', color=c, ms=4, label="
       << py_str(label + " (max-eigenvector, MC)") << ")\n";
  }
  py << "\nax.set_xlabel('" << xlabel << "')\n"
     << "ax.set_ylabel('Outage probability')\n";
  if (!style.title.empty()) py << "ax.set_title(" << py_str(style.title) << ")\n";
  py << "ax.grid(True, which='both', alpha=0.3)\n"
     << "ax.legend(fontsize=7)\n"
     << "fig.tight_layout()\n"
     << "fig.savefig(" << py_str(style.image) << ", dpi=150)\n";
  return py.str();
}

}  // namespace rissnr
