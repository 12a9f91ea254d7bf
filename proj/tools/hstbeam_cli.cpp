// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hstbeam Authors

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hstbeam/harness/config.hpp"
#include "hstbeam/harness/experiments.hpp"
#include "hstbeam/version.hpp"

namespace {

std::string defaults_text() {
  std::string s = "Defaults (SI units; override with a `key = value` config file):\n";
  for (const auto& [k, v] : hstbeam::harness::describe(hstbeam::harness::ExperimentConfig{})) {
    s += "  " + k + " = " + v + "\n";
  }
  s += "Config keys also accept unit-flagged forms: spacing_wavelengths, bs_coverage_angle_deg, theta_b_deg,\n"
       "v0_kmh, p0_dbm, noise_dbm. Unknown or repeated keys are rejected.\n";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Location-aware uplink beam planning for high-speed trains"};
  app.set_version_flag("--version", hstbeam::version);
  app.footer(defaults_text());
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::optional<std::int64_t> seed;
  bool parallel = false;
  app.add_option("--config", config_path, "Configuration file (key = value lines)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (default: output_dir from config, else .)");
  app.add_option("--seed", seed, "Seed for randomized runs (default 42)")->check(CLI::NonNegativeNumber);
  app.add_flag("--parallel", parallel, "Evaluate independent sweep points concurrently");

  const std::pair<const char*, const char*> commands[] = {
      {"tradeoff", "Directivity against beamwidth (tradeoff.csv)"},
      {"search-n", "Beam-count search at the configured operating point (search_n.csv)"},
      {"d-vs-theta", "Beam count and equivalent spacing across the coverage sector (d_vs_theta.csv)"},
      {"directivity-vs-sigma", "Beam count against positioning error (directivity_vs_sigma.csv)"},
      {"traverse", "Beam selection along one pass (traverse.csv)"},
      {"rate-region", "Encounter rate-region boundaries and T/FDS baseline (rate_region_eta_*.csv)"},
      {"symmetric", "Symmetric rate against entry offset (symmetric.csv)"},
      {"export-codebook", "Phase-excitation codebook (codebook.csv)"},
      {"run", "Experiment named in the config (default: all)"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    auto cfg = config_path.empty() ? hstbeam::harness::ExperimentConfig{} : hstbeam::harness::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed) cfg.seed = static_cast<std::uint64_t>(*seed);
    if (parallel) cfg.parallel = true;

    const std::string which = app.get_subcommands().front()->get_name();
    const auto tables =
        hstbeam::harness::experiment_tables(cfg, which == "run" ? std::string(to_string(cfg.name)) : which);
    const auto manifest = hstbeam::harness::write_outputs(cfg, tables);
    for (const auto& [file, rows] : manifest.row_counts) std::cout << file << ": " << rows << " rows\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
