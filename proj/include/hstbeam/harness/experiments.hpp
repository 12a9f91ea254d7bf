// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hstbeam Authors

#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <json.hpp>

#include "hstbeam/array_geometry.hpp"
#include "hstbeam/codebook.hpp"
#include "hstbeam/codebook_io.hpp"
#include "hstbeam/csv.hpp"
#include "hstbeam/encounter.hpp"
#include "hstbeam/harness/config.hpp"
#include "hstbeam/parallel.hpp"
#include "hstbeam/positioning.hpp"
#include "hstbeam/units.hpp"
#include "hstbeam/version.hpp"

namespace hstbeam::harness {

namespace detail {

inline std::string flag(bool b) { return b ? "1" : "0"; }

inline std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> out;
  for (int k = 0; k < points; ++k) {
    out.push_back(points == 1 ? lo : k + 1 == points ? hi : lo + (hi - lo) * k / (points - 1));
  }
  return out;
}

}  // namespace detail

/// Directivity against beamwidth over [tradeoff_min_rad, tradeoff_max_rad].
/// `equivalent_beam_count` is the (generally fractional) N whose beamwidth
/// equals the row's Theta_h for the configured spacing and wavelength.
inline csv::Table tradeoff_table(const ExperimentConfig& c) {
  csv::Table t{"tradeoff", {"theta_h_rad", "directivity", "product", "equivalent_beam_count"}, {}};
  const double C = c.array.design_constant;
  for (double th : detail::linspace(c.tradeoff_min_rad, c.tradeoff_max_rad, c.tradeoff_points)) {
    const double D = directivity_from_beamwidth(c.array.type, C, th);
    const double n = C * c.array.wavelength_m / (std::numbers::pi * c.array.spacing_m * th);
    t.rows.push_back({csv::number(th), csv::number(D), csv::number(D * th), csv::number(n)});
  }
  return t;
}

/// Doubling-search beam count across the whole coverage sector, one block per
/// threshold. Holding the directivity of the reference (d, beam_count)
/// fixed, the spacing that goes with n_opt beams is d' = d * beam_count /
/// n_opt, so d/d' and N'/N are reported side by side.
inline csv::Table d_vs_theta_table(const ExperimentConfig& c) {
  csv::Table t{"d_vs_theta",
               {"p_th", "theta_b_rad", "n_opt", "probability", "directivity", "d_over_dprime", "nprime_over_n",
                "spacing_prime_m", "infeasible"},
               {}};
  const auto thetas = detail::linspace(coverage_start(c.array), coverage_end(c.array), c.theta_points);
  for (double pth : c.p_th_grid) {
    PositioningModel model = c.positioning;
    model.probability_threshold = pth;
    const auto rows = hstbeam::detail::ordered_map(
        thetas.size(),
        [&](std::size_t k) {
          RailGeometry geo = c.rail;
          geo.theta_b_rad = thetas[k];
          const SearchResult r = search_beam_count(c.array, geo, model);
          const double ratio = static_cast<double>(r.optimal_beam_count) / c.beam_count;
          return std::vector<std::string>{csv::number(pth),
                                          csv::number(thetas[k]),
                                          csv::number(r.optimal_beam_count),
                                          csv::number(r.achieved_probability),
                                          csv::number(r.directivity_at_optimum),
                                          csv::number(ratio),
                                          csv::number(ratio),
                                          csv::number(c.array.spacing_m / ratio),
                                          detail::flag(!r.feasible)};
        },
        c.parallel);
    t.rows.insert(t.rows.end(), rows.begin(), rows.end());
  }
  return t;
}

/// Doubling-search beam count at the configured theta_b as the positioning
/// error grows, one block per threshold.
inline csv::Table directivity_vs_sigma_table(const ExperimentConfig& c) {
  csv::Table t{"directivity_vs_sigma", {"sigma_m", "p_th", "n_opt", "probability", "directivity", "infeasible"}, {}};
  for (double pth : c.p_th_grid) {
    for (double sigma : c.sigma_grid_m) {
      PositioningModel model = c.positioning;
      model.probability_threshold = pth;
      model.error_stddev_m = sigma;
      const SearchResult r = search_beam_count(c.array, c.rail, model);
      t.rows.push_back({csv::number(sigma), csv::number(pth), csv::number(r.optimal_beam_count),
                        csv::number(r.achieved_probability), csv::number(r.directivity_at_optimum),
                        detail::flag(!r.feasible)});
    }
  }
  return t;
}

/// Single search at the configured operating point, in both search modes.
inline csv::Table search_n_table(const ExperimentConfig& c) {
  csv::Table t{"search_n",
               {"theta_b_rad", "sigma_m", "p_th", "mode", "n_opt", "probability", "directivity", "infeasible"},
               {}};
  for (auto mode : {search_mode::doubling, search_mode::exhaustive}) {
    const SearchResult r = search_beam_count(c.array, c.rail, c.positioning, mode);
    t.rows.push_back({csv::number(c.rail.theta_b_rad), csv::number(c.positioning.error_stddev_m),
                      csv::number(c.positioning.probability_threshold),
                      mode == search_mode::doubling ? "doubling" : "exhaustive", csv::number(r.optimal_beam_count),
                      csv::number(r.achieved_probability), csv::number(r.directivity_at_optimum),
                      detail::flag(!r.feasible)});
  }
  return t;
}

inline std::string region_file_stem(double eta) { return "rate_region_eta_" + csv::number(eta); }

inline csv::Table region_table(const std::string& name, const RateRegion& region) {
  csv::Table t{name, {"R2_bps_hz", "R1_bps_hz"}, {}};
  for (const auto& p : region.pairs) t.rows.push_back({csv::number(p.r2), csv::number(p.r1)});
  return t;
}

/// One boundary file per entry offset in eta_grid plus the T/FDS segment
/// at the configured eta.
inline std::vector<csv::Table> rate_region_tables(const ExperimentConfig& c) {
  std::vector<csv::Table> out;
  for (double eta : c.eta_grid) {
    EncounterScenario sc = c.encounter;
    sc.eta = eta;
    out.push_back(region_table(region_file_stem(eta), rate_region(sc, c.region_points, c.parallel)));
  }
  out.push_back(region_table("tfds_baseline", tfds_baseline(c.encounter, c.region_points)));
  return out;
}

/// Symmetric rate R0 on a uniform eta grid over [0, 2], one block per
/// transmit power in p0_dbm_grid.
inline csv::Table symmetric_table(const ExperimentConfig& c) {
  csv::Table t{"symmetric", {"eta", "R0_bps_hz", "p0_dbm"}, {}};
  const auto etas = detail::linspace(0.0, 2.0, c.symmetric_eta_points);
  for (double p0 : c.p0_dbm_grid) {
    const auto r0 = hstbeam::detail::ordered_map(
        etas.size(),
        [&](std::size_t k) {
          EncounterScenario sc = c.encounter;
          sc.eta = etas[k];
          sc.power_w = units::dbm_to_watt(p0);
          return symmetric_rate(sc);
        },
        c.parallel);
    for (std::size_t k = 0; k < etas.size(); ++k) {
      t.rows.push_back({csv::number(etas[k]), csv::number(r0[k]), csv::number(p0)});
    }
  }
  return t;
}

/// Beam selection along one pass through the sector. With traverse_noisy
/// set, each sampled rail position is perturbed by N(0, sigma_m) drawn from
/// a generator seeded with `seed`; positions pushed ahead of sector entry
/// are held at the entry angle.
inline csv::Table traverse_table(const ExperimentConfig& c) {
  const PhaseMapper mapper = build_phase_mapper(c.array, c.beam_count);
  auto path = rail_pass_trajectory(c.array, c.encounter.speed_mps, c.rail.perpendicular_distance_m, c.traverse_step_s);
  if (c.traverse_noisy && c.positioning.error_stddev_m > 0.0) {
    boost::random::mt19937_64 rng(c.seed);
    boost::random::normal_distribution<double> noise(0.0, c.positioning.error_stddev_m);
    const double d0 = c.rail.perpendicular_distance_m;
    const double start = coverage_start(c.array);
    for (auto& p : path) {
      const double x = -d0 / std::tan(p.theta_b_rad) + noise(rng);
      p.theta_b_rad = std::max(start, std::atan2(d0, -x));
    }
  }
  return hstbeam::traverse_table(simulate_traverse(path, mapper, c.array));
}

inline csv::Table codebook_table(const ExperimentConfig& c) {
  return mapper_table(build_phase_mapper(c.array, c.beam_count));
}

struct RunManifest {
  std::vector<std::pair<std::string, std::string>> config;
  std::string tool_version = version;
  std::string timestamp;
  std::map<std::string, std::size_t> row_counts;  // keyed by CSV file name
  std::vector<std::string> notes;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["tool_version"] = tool_version;
    j["timestamp"] = timestamp;
    auto& cfg = j["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    j["row_counts"] = row_counts;
    j["notes"] = notes;
    return j;
  }
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Tables belonging to one CLI subcommand or config experiment name.
inline std::vector<csv::Table> experiment_tables(const ExperimentConfig& c, const std::string& which) {
  if (which == "tradeoff") return {tradeoff_table(c)};
  if (which == "d-vs-theta") return {d_vs_theta_table(c)};
  if (which == "directivity-vs-sigma") return {directivity_vs_sigma_table(c)};
  if (which == "search-n") return {search_n_table(c)};
  if (which == "rate-region") return rate_region_tables(c);
  if (which == "symmetric") return {symmetric_table(c)};
  if (which == "traverse") return {traverse_table(c)};
  if (which == "export-codebook") return {codebook_table(c)};
  if (which == "all") {
    std::vector<csv::Table> out;
    for (const char* w : {"tradeoff", "d-vs-theta", "directivity-vs-sigma", "search-n", "rate-region", "symmetric",
                          "traverse", "export-codebook"}) {
      auto part = experiment_tables(c, w);
      out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return out;
  }
  throw invalid_parameter("unknown experiment '" + which + "'");
}

/// Writes `<output_dir>/<name>.csv` for every table plus manifest.json.
inline RunManifest write_outputs(const ExperimentConfig& c, const std::vector<csv::Table>& tables) {
  namespace fs = std::filesystem;
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  RunManifest m;
  m.config = describe(c);
  m.timestamp = utc_timestamp();
  for (const auto& t : tables) {
    const std::string file = t.name + ".csv";
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw error("cannot write '" + (dir / file).string() + "'");
    t.write(out);
    m.row_counts[file] = t.rows.size();
  }
  m.notes.push_back("coverage interval [" + csv::number(coverage_start(c.array)) + ", " +
                    csv::number(coverage_end(c.array)) + "] rad; theta_b sweeps span exactly this interval");
  const double quarter = std::numbers::pi / 4.0;
  const bool quarter_inside = quarter >= coverage_start(c.array) && quarter <= coverage_end(c.array);
  m.notes.push_back(std::string("theta_b = pi/4 lies ") + (quarter_inside ? "inside" : "outside") +
                    " the coverage interval");
  std::ofstream js(dir / "manifest.json", std::ios::binary);
  js << m.to_json().dump(2) << '\n';
  return m;
}

inline RunManifest run_experiment(const ExperimentConfig& c) {
  return write_outputs(c, experiment_tables(c, std::string(to_string(c.name))));
}

}  // namespace hstbeam::harness
