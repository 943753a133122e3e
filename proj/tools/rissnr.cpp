// rissnr: run outage sweeps and distribution reports from a JSON config.
//
//   rissnr --config configs/optimum_phase.json --experiment outage-sweep --out out/
//   rissnr --experiment distribution-report --trials 200000 --out out/
//   rissnr --experiment plot --csv out/a.csv --csv out/b.csv --label random --label optimum --out fig.py

#include <rissnr/rissnr.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Outage analysis of RIS-assisted MIMO links"};

  std::string config_path;
  std::string experiment = "outage-sweep";
  std::string out;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string sweep;
  std::vector<std::string> csvs, labels;
  std::string title;

  app.add_option("--config", config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--experiment", experiment, "What to run")
      ->check(CLI::IsMember({"outage-sweep", "distribution-report", "samples", "plot", "show-config"}));
  app.add_option("--out", out, "Output directory (plot: script path)");
  app.add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--threads", threads, "Worker threads, 0 for all cores");
  app.add_option("--sweep", sweep, "Override the sweep: var:start:stop:step");
  app.add_option("--csv", csvs, "Outage CSV to plot (repeatable)");
  app.add_option("--label", labels, "Legend label per --csv");
  app.add_option("--title", title, "Plot title");
  CLI11_PARSE(app, argc, argv);

  try {
    if (experiment == "plot") {
      if (csvs.empty()) throw std::invalid_argument("plot needs at least one --csv");
      const fs::path script = out.empty() ? fs::path("outage_plot.py") : fs::path(out);
      rissnr::PlotStyle style;
      style.title = title;
      style.labels = labels;
      style.image = script.stem().string() + ".png";
      rissnr::write_file_atomic(script, rissnr::emit_plot_script({csvs.begin(), csvs.end()}, style));
      std::cout << script.string() << "\n";
      return 0;
    }

    rissnr::ExperimentConfig cfg = config_path.empty() ? rissnr::ExperimentConfig{} : rissnr::load_config(config_path);
    if (trials) cfg.sim.trials = *trials;
    if (seed) cfg.sim.seed = *seed;
    if (threads) cfg.sim.threads = *threads;
    if (!sweep.empty()) cfg.sweep = rissnr::parse_sweep_flag(sweep);
    if (!out.empty()) cfg.output_dir = out;
    cfg.validate();

    const std::string hash = rissnr::config_hash(cfg);
    const fs::path dir(cfg.output_dir);

    if (experiment == "show-config") {
      std::cout << rissnr::to_json(cfg).dump(2) << "\nconfig_hash " << hash << "\n";
      return 0;
    }
    if (experiment == "outage-sweep") {
      const auto table = rissnr::run_outage_sweep(cfg);
      const fs::path path = dir / (cfg.scenario + "_outage.csv");
      rissnr::write_file_atomic(path, rissnr::to_csv(table));
      std::size_t bad = 0;
      for (const auto& r : table.rows)
        if (r.status.rfind("ok", 0) != 0) {
          ++bad;
          std::cerr << "sweep point " << r.sweep_value << ": " << r.status << "\n";
        }
      std::cout << path.string() << "\n";
      return bad == 0 ? 0 : 3;
    }
    if (experiment == "distribution-report") {
      const fs::path path = dir / (cfg.scenario + "_distribution.csv");
      rissnr::write_file_atomic(path, rissnr::to_csv(rissnr::run_distribution_report(cfg)));
      std::cout << path.string() << "\n";
      return 0;
    }
    // samples: raw SNR draws at the configured operating point
    rissnr::SimConfig s = cfg.sim;
    s.rho_bar = rissnr::db_to_linear(cfg.rho_bar_db);
    auto ls = rissnr::simulate_link(s, cfg.analysis.benchmark);
    for (double& v : ls.los) v *= s.rho_bar;
    for (double& v : ls.benchmark) v *= s.rho_bar;
    fs::create_directories(dir);
    const fs::path los = dir / (cfg.scenario + "_snr_los.bin");
    rissnr::write_sample_file(los, ls.los, hash, cfg.sim.seed);
    std::cout << los.string() << "\n";
    if (!ls.benchmark.empty()) {
      const fs::path b = dir / (cfg.scenario + "_snr_benchmark.bin");
      rissnr::write_sample_file(b, ls.benchmark, hash, cfg.sim.seed);
      std::cout << b.string() << "\n";
    }
    if (ls.power_iteration_failures > 0)
      std::cerr << "warning: " << ls.power_iteration_failures << " power iterations did not converge\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "rissnr: " << e.what() << "\n";
    return 2;
  }
}
