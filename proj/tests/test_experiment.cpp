#include <rissnr/experiment.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

using namespace rissnr;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("rissnr_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

ExperimentConfig quick_config() {
  ExperimentConfig c;
  c.sim.ris = {6, 6, 0.5, 0.5};
  c.sim.trials = 5000;
  c.sweep = SweepSpec::range(SweepVariable::rho_bar_db, -30, -26, 1);
  return c;
}

}  // namespace

TEST(Sweep, Ranges) {
  EXPECT_EQ(SweepSpec::range(SweepVariable::rho_bar_db, -3, 0, 1).values, (std::vector<double>{-3, -2, -1, 0}));
  EXPECT_EQ(SweepSpec::range(SweepVariable::rho_bar_db, 5, 5, 1).values.size(), 1u);
  EXPECT_EQ(SweepSpec::range(SweepVariable::rho_bar_db, -38, -35.5, 0.1).values.size(), 26u);
  EXPECT_THROW(SweepSpec::range(SweepVariable::rho_bar_db, 0, 5, -1), std::invalid_argument);
  const auto s = parse_sweep_flag("n_ris:64:144:16");
  EXPECT_EQ(s.variable, SweepVariable::n_ris);
  EXPECT_EQ(s.values.front(), 64);
  EXPECT_EQ(s.values.back(), 144);
  EXPECT_THROW(parse_sweep_flag("n_ris:64:144"), std::invalid_argument);
  EXPECT_THROW(parse_sweep_flag("k:1:2:1"), std::invalid_argument);
  EXPECT_THROW(parse_sweep_flag("bits:a:2:1"), std::invalid_argument);
  SweepSpec bad{SweepVariable::n_ris, {10.5}};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Config, DefaultsFromEmptyObject) {
  const auto c = config_from_json(json::object());
  EXPECT_EQ(c.sim.n_t(), 4u);
  EXPECT_EQ(c.sim.tx.n_x, 2u);
  EXPECT_EQ(c.sim.n_ris(), 100u);
  EXPECT_EQ(c.sim.ris.n_x, 10u);
  EXPECT_EQ(c.sim.n_r(), 4u);
  EXPECT_EQ(*c.sim.policy.bits, 2);
  EXPECT_DOUBLE_EQ(c.sim.amplitude.zeta_min, 0.8);
  EXPECT_DOUBLE_EQ(c.sim.amplitude.c, 0.43 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(c.sim.amplitude.k, 1.6);
  EXPECT_DOUBLE_EQ(c.rho_th, 15.0);
  EXPECT_DOUBLE_EQ(c.carrier_frequency_hz, 3.6e9);
  EXPECT_NEAR(c.sim.ris_in.azimuth, std::numbers::pi / 6, 1e-15);
  EXPECT_NEAR(c.sim.ris_out.elevation, std::numbers::pi / 5, 1e-15);
  EXPECT_NEAR(c.sim.rx_angle, std::numbers::pi / 5, 1e-15);
  EXPECT_NEAR(c.sim.tx_angle.elevation, std::numbers::pi / 4, 1e-15);
  EXPECT_EQ(config_hash(c), config_hash(ExperimentConfig{}));
}

TEST(Config, RoundTripAndHash) {
  json j = {{"arrays", {{"n_ris", 64}}}, {"ris", {{"policy", "random"}, {"bits", 3}}}, {"simulation", {{"seed", 9}}}};
  const auto c = config_from_json(j);
  EXPECT_EQ(c.sim.ris.n_x, 8u);
  EXPECT_EQ(c.sim.policy.mode, PhaseMode::random);
  const auto back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
  EXPECT_EQ(config_hash(back), config_hash(c));

  auto other = c;
  other.sim.threads = 8;
  other.output_dir = "/elsewhere";
  EXPECT_EQ(config_hash(other), config_hash(c));
  other.sim.seed = 10;
  EXPECT_NE(config_hash(other), config_hash(c));
}

TEST(Config, Rejections) {
  EXPECT_THROW(config_from_json(json{{"trails", 5}}), std::invalid_argument);
  EXPECT_THROW(config_from_json(json{{"arrays", {{"n_ris", 100}, {"ris_shape", {5, 5}}}}}), std::invalid_argument);
  EXPECT_THROW(config_from_json(json{{"ris", {{"policy", "optimal-discrete"}, {"bits", "continuous"}}}}),
               std::invalid_argument);
  EXPECT_THROW(config_from_json(json{{"rho_th", -1}}), std::invalid_argument);
  EXPECT_THROW(config_from_json(json{{"arrays", "four"}}), std::invalid_argument);
  EXPECT_THROW(config_from_json(json::array()), std::invalid_argument);
}

TEST(Config, ShippedConfigsLoad) {
  for (const auto& e : fs::directory_iterator(RISSNR_CONFIG_DIR)) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_config(e.path())) << e.path();
  }
}

TEST(OutageSweep, DeterministicCsv) {
  auto c = quick_config();
  const std::string a = to_csv(run_outage_sweep(c));
  c.sim.threads = 3;
  const std::string b = to_csv(run_outage_sweep(c));
  EXPECT_EQ(a, b);
  const auto t = parse_csv(a);
  EXPECT_EQ(t.rows.size(), 5u);
  EXPECT_EQ(t.header.at(0), "config_hash");
  for (const auto& r : t.rows) EXPECT_EQ(r[t.column("status")], "ok");
}

TEST(OutageSweep, SinglePointGivesSingleRow) {
  auto c = quick_config();
  c.sweep = SweepSpec::range(SweepVariable::rho_bar_db, -28, -28, 1);
  EXPECT_EQ(run_outage_sweep(c).rows.size(), 1u);
}

TEST(OutageSweep, SpaTracksMonteCarlo) {
  auto c = quick_config();
  c.sim.trials = 40000;
  c.sweep = SweepSpec::range(SweepVariable::rho_bar_db, -30, -22, 0.5);
  for (const auto& r : run_outage_sweep(c).rows) {
    ASSERT_TRUE(r.p_out_spa && r.p_out_mc && r.p_out_benchmark_mc);
    EXPECT_LE(std::abs(*r.p_out_spa - *r.p_out_mc), std::max(0.02, 4 * *r.mc_stderr)) << r.sweep_value;
    EXPECT_LE(*r.p_out_benchmark_mc, *r.p_out_mc + 1e-12);
  }
}

TEST(OutageSweep, RisSizeAndBitsSweeps) {
  auto c = quick_config();
  c.analysis.benchmark = false;
  c.rho_bar_db = -29;
  c.sweep = {SweepVariable::n_ris, {16, 36, 64}};
  const auto t = run_outage_sweep(c);
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_GE(*t.rows[0].p_out_spa, *t.rows[1].p_out_spa);
  EXPECT_GE(*t.rows[1].p_out_spa, *t.rows[2].p_out_spa);
  EXPECT_FALSE(t.rows[0].p_out_benchmark_mc.has_value());

  c.sweep = {SweepVariable::bits, {1, 2, 3}};
  const auto tb = run_outage_sweep(c);
  EXPECT_GE(*tb.rows[0].p_out_spa, *tb.rows[1].p_out_spa);
  EXPECT_GE(*tb.rows[1].p_out_spa, *tb.rows[2].p_out_spa);
}

TEST(OutageSweep, AnalysisToggles) {
  auto c = quick_config();
  c.analysis.monte_carlo = false;
  const auto t = run_outage_sweep(c);
  for (const auto& r : t.rows) {
    EXPECT_TRUE(r.p_out_spa.has_value());
    EXPECT_FALSE(r.p_out_mc.has_value());
  }
  const auto csv = parse_csv(to_csv(t));
  EXPECT_EQ(csv.rows[0][csv.column("p_out_mc")], "");
}

TEST(Csv, QuotingRoundTrip) {
  OutageTable t{"00ff", "name, with \"quotes\"", SweepVariable::bits, {{1.0, 0.5, std::nullopt, std::nullopt, std::nullopt, "error: a, b"}}};
  const auto p = parse_csv(to_csv(t));
  EXPECT_EQ(p.rows[0][1], "name, with \"quotes\"");
  EXPECT_EQ(p.rows[0][p.column("status")], "error: a, b");
  EXPECT_THROW(parse_csv("a,b\n1\n"), std::invalid_argument);
  EXPECT_THROW(parse_csv("a,\"b\n"), std::invalid_argument);
}

TEST(Csv, MixedConfigurationsRejected) {
  const auto d = scratch_dir("mixed");
  auto c = quick_config();
  c.analysis.monte_carlo = false;
  auto t = run_outage_sweep(c);
  std::string text = to_csv(t);
  c.sim.seed = 2;
  const std::string other = to_csv(run_outage_sweep(c));
  text += other.substr(other.find('\n') + 1);
  write_file_atomic(d / "mixed.csv", text);
  EXPECT_THROW(read_outage_csv(d / "mixed.csv"), std::invalid_argument);
  fs::remove_all(d);
}

TEST(Distribution, ReportColumns) {
  ExperimentConfig c;
  c.sim.trials = 200000;
  const auto t = run_distribution_report(c);
  ASSERT_EQ(t.rows.size(), 200u);
  EXPECT_LT(*t.rows.front().cdf_spa, 0.01);
  EXPECT_GT(*t.rows.back().cdf_spa, 0.99);
  const double band = dkw_epsilon(c.sim.trials, 0.01);
  for (const auto& r : t.rows) {
    EXPECT_NEAR(*r.cdf_spa, *r.cdf_gil_pelaez, 5e-3);
    EXPECT_NEAR(*r.cdf_empirical, *r.cdf_gil_pelaez, band);
    EXPECT_NEAR(*r.cdf_channel_mc, *r.cdf_gil_pelaez, 0.02);
    EXPECT_GE(*r.pdf_spa, 0.0);
  }
  EXPECT_EQ(parse_csv(to_csv(t)).rows.size(), 200u);
}

TEST(Distribution, ClipsGridAtZero) {
  const QuadFormSpec wide{{1.0}, {0.0}};
  const auto g = default_q_grid(wide, 50);
  EXPECT_GT(g.front(), 0.0);
  EXPECT_EQ(g.size(), 50u);
}

namespace {

bool python_has_matplotlib() {
  return std::system("python3 -c 'import matplotlib' > /dev/null 2>&1") == 0;
}

}  // namespace

TEST(Plot, ScriptRunsAndHasOneEntryPerCsv) {
  const auto d = scratch_dir("plot");
  std::vector<fs::path> csvs;
  for (int b = 1; b <= 3; ++b) {
    auto c = quick_config();
    c.scenario = "b" + std::to_string(b);
    c.sim.policy.bits = b;
    c.sim.trials = 2000;
    csvs.push_back(d / (c.scenario + ".csv"));
    write_file_atomic(csvs.back(), to_csv(run_outage_sweep(c)));
  }
  PlotStyle style;
  style.image = (d / "out.png").string();
  style.labels = {"1 bit", "2 bits", "3 bits"};
  const std::string one = emit_plot_script({csvs[0]}, style);
  EXPECT_NE(one.find("1 bit (SPA)"), std::string::npos);
  EXPECT_EQ(one.find("2 bits (SPA)"), std::string::npos);
  const std::string three = emit_plot_script(csvs, style);
  for (const char* l : {"1 bit (SPA)", "2 bits (MC)", "3 bits (SPA)"}) EXPECT_NE(three.find(l), std::string::npos);
  write_file_atomic(d / "plot.py", three);
  if (!python_has_matplotlib()) GTEST_SKIP() << "matplotlib not available";
  const std::string cmd = "MPLBACKEND=Agg python3 " + (d / "plot.py").string();
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(d / "out.png"));
  fs::remove_all(d);
}

TEST(Plot, MissingInput) {
  EXPECT_THROW(emit_plot_script({}, {}), std::invalid_argument);
  EXPECT_THROW(emit_plot_script({"/nonexistent/x.csv"}, {}), std::invalid_argument);
}

#ifdef RISSNR_CLI_PATH
TEST(Cli, RunsAndReportsErrors) {
  const auto d = scratch_dir("cli");
  const std::string exe = RISSNR_CLI_PATH;
  const std::string base = exe + " --trials 3000 --sweep rho_bar_db:-30:-28:1 --out " + d.string();
  const std::string cfg = std::string(" --config ") + RISSNR_CONFIG_DIR + "/optimum_phase.json";
  ASSERT_EQ(std::system((base + cfg + " --threads 1 > /dev/null").c_str()), 0);
  const std::string first = read_text(d / "optimum-phase_outage.csv");
  ASSERT_EQ(std::system((base + cfg + " --threads 2 > /dev/null").c_str()), 0);
  EXPECT_EQ(read_text(d / "optimum-phase_outage.csv"), first);
  EXPECT_EQ(parse_csv(first).rows.size(), 3u);

  ASSERT_EQ(std::system((base + cfg + " --experiment samples > /dev/null").c_str()), 0);
  EXPECT_EQ(read_sample_file(d / "optimum-phase_snr_los.bin").values.size(), 3000u);

  const std::string plot = exe + " --experiment plot --csv " + (d / "optimum-phase_outage.csv").string() +
                           " --out " + (d / "p.py").string() + " > /dev/null";
  EXPECT_EQ(std::system(plot.c_str()), 0);
  EXPECT_TRUE(fs::exists(d / "p.py"));

  EXPECT_NE(std::system((exe + " --sweep nonsense 2> /dev/null").c_str()), 0);
  EXPECT_NE(std::system((exe + " --config /nonexistent.json 2> /dev/null").c_str()), 0);
  EXPECT_NE(std::system((exe + " --experiment plot 2> /dev/null").c_str()), 0);
  fs::remove_all(d);
}
#endif
