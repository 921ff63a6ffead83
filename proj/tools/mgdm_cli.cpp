// Experiment runner for the mode-group-division-multiplexed link simulator.
//
// Exit codes: 0 success, 2 configuration error, 3 synchronization failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mgdm/runner.hpp"

namespace {

mgdm::RunConfig load_or_default(const std::string& config_path) {
  if (config_path.empty()) return mgdm::RunConfig{};
  return mgdm::load_config(config_path);
}

std::vector<double> parse_grid(const std::string& spec) {
  // "lo:hi:step" or comma-separated list
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    double lo, hi, step;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
      throw mgdm::ConfigError("bad grid spec '" + spec + "', expected lo:hi:step");
    for (double x = lo; x <= hi + 1e-9; x += step) grid.push_back(x);
  } else {
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"4x28 Gbit/s mode-group-division-multiplexed GI-MMF link simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", grid_spec = "-25:-12:1";
  int workers = 0, eye_group = 3, max_group = 6;
  double fec_ber_lo = 1e-6, fec_ber_hi = 1e-2;
  int fec_ber_points = 13;

  app.add_option("-c,--config", config_path, "JSON run-config file (defaults when omitted)");
  app.add_option("-w,--workers", workers, "parallel workers (0 = auto)");

  auto* modes = app.add_subcommand("modes", "print mode-group table with beta and group delay");
  modes->add_option("--max-group", max_group, "highest group order to list");

  auto* run_single = app.add_subcommand("run-single", "experiment 1: one channel at a time");
  run_single->add_option("-o,--out", out_dir, "output directory");

  auto* run_four = app.add_subcommand("run-four", "experiment 2: four simultaneous channels");
  run_four->add_option("-o,--out", out_dir, "output directory");

  auto* sweep = app.add_subcommand("sweep-xt", "four-channel runs over a crosstalk grid");
  sweep->add_option("-g,--grid", grid_spec, "xt grid in dB: lo:hi:step or comma list");
  sweep->add_option("-o,--out", out_dir, "output directory");

  auto* fec = app.add_subcommand("fec-budget", "pre-FEC BER grid vs post-FEC bound (CSV)");
  fec->add_option("--ber-lo", fec_ber_lo, "lowest pre-FEC BER");
  fec->add_option("--ber-hi", fec_ber_hi, "highest pre-FEC BER");
  fec->add_option("--points", fec_ber_points, "grid points (log-spaced)");

  auto* eye = app.add_subcommand("eye", "emit eye-diagram CSV for one group");
  eye->add_option("--group", eye_group, "mode-group order");
  eye->add_option("-o,--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    const mgdm::RunConfig config = load_or_default(config_path);

    if (modes->parsed()) {
      std::vector<int> orders;
      for (int m = 3; m <= max_group; ++m) orders.push_back(m);
      std::cout << mgdm::format_mode_table(config.fiber, orders);
      return 0;
    }
    if (run_single->parsed()) {
      const mgdm::RunResult res = mgdm::run_single_channel(config, workers);
      mgdm::write_outputs(res, out_dir);
      for (const auto& ch : res.channels)
        std::cout << "MG" << ch.group << ": " << ch.stats.total_errors << " errors / "
                  << ch.stats.total_bits << " bits, average BER " << ch.stats.average_ber
                  << "\n";
      return 0;
    }
    if (run_four->parsed()) {
      const mgdm::RunResult res = mgdm::run_four_channel(config, workers);
      mgdm::write_outputs(res, out_dir);
      for (const auto& ch : res.channels)
        std::cout << "MG" << ch.group << ": " << ch.stats.total_errors << " errors / "
                  << ch.stats.total_bits << " bits, average BER " << ch.stats.average_ber
                  << "\n";
      return 0;
    }
    if (sweep->parsed()) {
      const auto points = mgdm::sweep_crosstalk(config, parse_grid(grid_spec), workers);
      std::filesystem::create_directories(out_dir);
      mgdm::write_sweep_csv(points, std::filesystem::path(out_dir) / "sweep.csv");
      std::cout << "wrote " << points.size() << " sweep rows\n";
      return 0;
    }
    if (fec->parsed()) {
      std::cout << "pre_fec_ber,post_fec_bound\n";
      for (int i = 0; i < fec_ber_points; ++i) {
        const double frac = fec_ber_points > 1 ? double(i) / (fec_ber_points - 1) : 0.0;
        const double ber = fec_ber_lo * std::pow(fec_ber_hi / fec_ber_lo, frac);
        char buf[80];
        std::snprintf(buf, sizeof(buf), "%.6e,%.6e\n", ber,
                      mgdm::post_fec_bound(ber, config.fec));
        std::cout << buf;
      }
      return 0;
    }
    if (eye->parsed()) {
      std::filesystem::create_directories(out_dir);
      mgdm::write_eye_csv(config, eye_group, std::filesystem::path(out_dir) / "eye.csv");
      std::cout << "wrote eye.csv\n";
      return 0;
    }
  } catch (const mgdm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mgdm::SyncError& e) {
    std::cerr << "sync failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
