// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hstbeam Authors

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hstbeam/array_geometry.hpp"
#include "hstbeam/csv.hpp"
#include "hstbeam/encounter.hpp"
#include "hstbeam/error.hpp"
#include "hstbeam/positioning.hpp"
#include "hstbeam/units.hpp"

namespace hstbeam::harness {

/// Configuration problem, tagged with the offending line (0 when the
/// problem involves defaults only).
class config_error : public error {
 public:
  config_error(int line, const std::string& what)
      : error(line > 0 ? "config line " + std::to_string(line) + ": " + what : "config: " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

enum class experiment { all, tradeoff, d_vs_theta, directivity_vs_sigma, rate_region, symmetric };

inline std::string_view to_string(experiment e) {
  switch (e) {
    case experiment::tradeoff: return "tradeoff";
    case experiment::d_vs_theta: return "d-vs-theta";
    case experiment::directivity_vs_sigma: return "directivity-vs-sigma";
    case experiment::rate_region: return "rate-region";
    case experiment::symmetric: return "symmetric";
    case experiment::all: break;
  }
  return "all";
}

/// Every knob of every experiment. Defaults reproduce the reference
/// scenario: d0 = 50 m, h0 = 20 m, 360 km/h, L = 800 m, alpha0 = 3,
/// 2.4 GHz carrier, half-wavelength spacing, 128 elements and beams.
struct ExperimentConfig {
  double carrier_hz = 2.4e9;
  ArrayConfig array = [] {
    ArrayConfig a = ArrayConfig::half_wavelength(128, 2.4e9);
    a.bs_coverage_angle_rad = std::numbers::pi / 2.0;
    return a;
  }();
  int beam_count = 128;
  RailGeometry rail{50.0, 20.0, std::numbers::pi / 4.0};
  PositioningModel positioning{1.0, 0.9, 128};
  EncounterScenario encounter{};

  experiment name = experiment::all;
  int tradeoff_points = 200;
  double tradeoff_min_rad = 0.01;
  double tradeoff_max_rad = std::numbers::pi;
  int theta_points = 101;
  std::vector<double> sigma_grid_m{0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> p_th_grid{0.7, 0.8, 0.9};
  std::vector<double> eta_grid{0.0, 0.8, 1.6, 2.0};
  int region_points = 51;
  int symmetric_eta_points = 21;
  std::vector<double> p0_dbm_grid{37.0, 43.0, 47.0};
  double traverse_step_s = 0.001;
  bool traverse_noisy = false;
  std::uint64_t seed = 42;
  bool parallel = false;
  std::string output_dir = ".";
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double to_double(const std::string& v, int line) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out)) {
    throw config_error(line, "cannot parse '" + v + "' as a number");
  }
  return out;
}

inline long long to_integer(const std::string& v, int line) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) throw config_error(line, "cannot parse '" + v + "' as an integer");
  return out;
}

inline int to_int(const std::string& v, int line, int lo) {
  const long long x = to_integer(v, line);
  if (x < lo || x > 1'000'000'000) throw config_error(line, "value " + v + " out of range");
  return static_cast<int>(x);
}

inline bool to_bool(const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw config_error(line, "cannot parse '" + v + "' as a boolean");
}

inline std::vector<double> to_list(const std::string& v, int line) {
  std::vector<double> out;
  for (const auto& cell : csv::split(v)) out.push_back(to_double(trim(cell), line));
  if (out.empty()) throw config_error(line, "list must not be empty");
  return out;
}

inline void check(bool ok, int line, const std::string& what) {
  if (!ok) throw config_error(line, what);
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, int)>;

struct Key {
  std::string group;  // keys in one group set the same quantity in different units
  Setter set;
};

inline const std::map<std::string, Key>& keys() {
  static const std::map<std::string, Key> table = [] {
    std::map<std::string, Key> k;
    const auto positive = [](double x, int line, const char* what) {
      check(x > 0.0, line, std::string(what) + " must be positive");
      return x;
    };
    k["element_count"] = {"element_count", [](auto& c, auto& v, int l) { c.array.element_count = to_int(v, l, 1); }};
    k["beam_count"] = {"beam_count", [](auto& c, auto& v, int l) { c.beam_count = to_int(v, l, 1); }};
    k["carrier_hz"] = {"carrier", [=](auto& c, auto& v, int l) { c.carrier_hz = positive(to_double(v, l), l, "carrier"); }};
    k["spacing_wavelengths"] = {"spacing", [=](auto& c, auto& v, int l) {
                                  c.array.spacing_m = -positive(to_double(v, l), l, "spacing");
                                }};  // negative marks "in wavelengths" until the carrier is known
    k["spacing_m"] = {"spacing", [=](auto& c, auto& v, int l) { c.array.spacing_m = positive(to_double(v, l), l, "spacing"); }};
    k["design_constant"] = {"design_constant", [=](auto& c, auto& v, int l) {
                              c.array.design_constant = positive(to_double(v, l), l, "design constant");
                            }};
    k["array_type"] = {"array_type", [](auto& c, auto& v, int l) {
                         if (v == "broadside" || v == "2") c.array.type = array_type::broadside;
                         else if (v == "endfire" || v == "end-fire" || v == "4") c.array.type = array_type::endfire;
                         else throw config_error(l, "array_type must be broadside (2) or endfire (4)");
                       }};
    k["bs_coverage_angle_deg"] = {"bs_coverage", [](auto& c, auto& v, int l) {
                                    c.array.bs_coverage_angle_rad = units::deg_to_rad(to_double(v, l));
                                  }};
    k["bs_coverage_angle_rad"] = {"bs_coverage", [](auto& c, auto& v, int l) { c.array.bs_coverage_angle_rad = to_double(v, l); }};
    k["d0_m"] = {"d0", [=](auto& c, auto& v, int l) {
                   c.rail.perpendicular_distance_m = positive(to_double(v, l), l, "d0");
                   c.encounter.perpendicular_distance_m = c.rail.perpendicular_distance_m;
                 }};
    k["h0_m"] = {"h0", [](auto& c, auto& v, int l) {
                   const double h = to_double(v, l);
                   check(h >= 0.0, l, "h0 must be non-negative");
                   c.rail.antenna_height_m = h;
                   c.encounter.antenna_height_m = h;
                 }};
    k["theta_b_deg"] = {"theta_b", [](auto& c, auto& v, int l) { c.rail.theta_b_rad = units::deg_to_rad(to_double(v, l)); }};
    k["theta_b_rad"] = {"theta_b", [](auto& c, auto& v, int l) { c.rail.theta_b_rad = to_double(v, l); }};
    k["sigma_m"] = {"sigma", [](auto& c, auto& v, int l) {
                      const double s = to_double(v, l);
                      check(s >= 0.0, l, "sigma must be non-negative");
                      c.positioning.error_stddev_m = s;
                    }};
    k["p_th"] = {"p_th", [](auto& c, auto& v, int l) {
                   const double p = to_double(v, l);
                   check(p > 0.0 && p < 1.0, l, "p_th must lie in (0, 1)");
                   c.positioning.probability_threshold = p;
                 }};
    k["max_beam_count"] = {"max_beam_count", [](auto& c, auto& v, int l) { c.positioning.max_beam_count = to_int(v, l, 1); }};
    k["half_coverage_m"] = {"L", [=](auto& c, auto& v, int l) {
                              c.encounter.half_coverage_m = positive(to_double(v, l), l, "half coverage");
                            }};
    k["v0_kmh"] = {"v0", [=](auto& c, auto& v, int l) {
                     c.encounter.speed_mps = units::kmh_to_mps(positive(to_double(v, l), l, "speed"));
                   }};
    k["v0_mps"] = {"v0", [=](auto& c, auto& v, int l) { c.encounter.speed_mps = positive(to_double(v, l), l, "speed"); }};
    k["path_loss_exponent"] = {"alpha0", [](auto& c, auto& v, int l) {
                                 const double a = to_double(v, l);
                                 check(a >= 2.0 && a <= 5.0, l, "path_loss_exponent must lie in [2, 5]");
                                 c.encounter.path_loss_exponent = a;
                               }};
    k["p0_dbm"] = {"p0", [](auto& c, auto& v, int l) { c.encounter.power_w = units::dbm_to_watt(to_double(v, l)); }};
    k["p0_w"] = {"p0", [](auto& c, auto& v, int l) {
                   const double p = to_double(v, l);
                   check(p >= 0.0, l, "p0 must be non-negative");
                   c.encounter.power_w = p;
                 }};
    k["noise_dbm"] = {"noise", [](auto& c, auto& v, int l) { c.encounter.noise_power_w = units::dbm_to_watt(to_double(v, l)); }};
    k["noise_w"] = {"noise", [=](auto& c, auto& v, int l) {
                      c.encounter.noise_power_w = positive(to_double(v, l), l, "noise power");
                    }};
    k["eta"] = {"eta", [](auto& c, auto& v, int l) {
                  const double e = to_double(v, l);
                  check(e >= 0.0 && e <= 2.0, l, "eta must lie in [0, 2]");
                  c.encounter.eta = e;
                }};
    k["beam_weight_1"] = {"w1", [=](auto& c, auto& v, int l) {
                            c.encounter.beam_weight_1 = positive(to_double(v, l), l, "beam weight");
                          }};
    k["beam_weight_2"] = {"w2", [=](auto& c, auto& v, int l) {
                            c.encounter.beam_weight_2 = positive(to_double(v, l), l, "beam weight");
                          }};
    k["experiment"] = {"experiment", [](auto& c, auto& v, int l) {
                         for (auto e : {experiment::all, experiment::tradeoff, experiment::d_vs_theta,
                                        experiment::directivity_vs_sigma, experiment::rate_region, experiment::symmetric}) {
                           if (v == to_string(e)) {
                             c.name = e;
                             return;
                           }
                         }
                         throw config_error(l, "unknown experiment '" + v + "'");
                       }};
    k["tradeoff_points"] = {"tradeoff_points", [](auto& c, auto& v, int l) { c.tradeoff_points = to_int(v, l, 2); }};
    k["theta_points"] = {"theta_points", [](auto& c, auto& v, int l) { c.theta_points = to_int(v, l, 1); }};
    k["sigma_grid_m"] = {"sigma_grid", [](auto& c, auto& v, int l) {
                           c.sigma_grid_m = to_list(v, l);
                           for (double s : c.sigma_grid_m) check(s >= 0.0, l, "sigma grid values must be non-negative");
                         }};
    k["p_th_grid"] = {"p_th_grid", [](auto& c, auto& v, int l) {
                        c.p_th_grid = to_list(v, l);
                        for (double p : c.p_th_grid) check(p > 0.0 && p < 1.0, l, "p_th grid values must lie in (0, 1)");
                      }};
    k["eta_grid"] = {"eta_grid", [](auto& c, auto& v, int l) {
                       c.eta_grid = to_list(v, l);
                       for (double e : c.eta_grid) check(e >= 0.0 && e <= 2.0, l, "eta grid values must lie in [0, 2]");
                     }};
    k["region_points"] = {"region_points", [](auto& c, auto& v, int l) { c.region_points = to_int(v, l, 2); }};
    k["symmetric_eta_points"] = {"symmetric_eta_points", [](auto& c, auto& v, int l) {
                                   c.symmetric_eta_points = to_int(v, l, 2);
                                 }};
    k["p0_dbm_grid"] = {"p0_dbm_grid", [](auto& c, auto& v, int l) { c.p0_dbm_grid = to_list(v, l); }};
    k["traverse_step_s"] = {"traverse_step", [=](auto& c, auto& v, int l) {
                              c.traverse_step_s = positive(to_double(v, l), l, "traverse step");
                            }};
    k["traverse_noisy"] = {"traverse_noisy", [](auto& c, auto& v, int l) { c.traverse_noisy = to_bool(v, l); }};
    k["seed"] = {"seed", [](auto& c, auto& v, int l) {
                   const long long s = to_integer(v, l);
                   check(s >= 0, l, "seed must be non-negative");
                   c.seed = static_cast<std::uint64_t>(s);
                 }};
    k["parallel"] = {"parallel", [](auto& c, auto& v, int l) { c.parallel = to_bool(v, l); }};
    k["output_dir"] = {"output_dir", [](auto& c, auto& v, int) { c.output_dir = v; }};
    return k;
  }();
  return table;
}

}  // namespace detail

/// Parses `key = value` lines; `#` starts a comment. Absent keys keep their
/// defaults. Unknown keys, repeated quantities and out-of-range values are
/// rejected with the line number.
inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::map<std::string, int> group_line;
  std::string raw;
  bool spacing_set = false;
  int carrier_line = 0;
  for (int line = 1; std::getline(in, raw); ++line) {
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string text = detail::trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw config_error(line, "expected 'key = value'");
    const std::string key = detail::trim(std::string_view(text).substr(0, eq));
    const std::string value = detail::trim(std::string_view(text).substr(eq + 1));
    const auto it = detail::keys().find(key);
    if (it == detail::keys().end()) throw config_error(line, "unknown key '" + key + "'");
    if (value.empty()) throw config_error(line, "missing value for '" + key + "'");
    if (const auto prev = group_line.find(it->second.group); prev != group_line.end()) {
      throw config_error(line, "'" + key + "' repeats a quantity already set on line " + std::to_string(prev->second));
    }
    group_line[it->second.group] = line;
    it->second.set(cfg, value, line);
    if (it->second.group == "spacing") spacing_set = true;
    if (key == "carrier_hz") carrier_line = line;
  }

  cfg.array.wavelength_m = wavelength_from_frequency(cfg.carrier_hz);
  if (!spacing_set) cfg.array.spacing_m = cfg.array.wavelength_m / 2.0;
  else if (cfg.array.spacing_m < 0.0) cfg.array.spacing_m = -cfg.array.spacing_m * cfg.array.wavelength_m;
  if (!group_line.contains("max_beam_count")) cfg.positioning.max_beam_count = cfg.array.element_count;
  (void)carrier_line;

  const auto line_of = [&](std::initializer_list<const char*> groups) {
    int l = 0;
    for (const char* g : groups) {
      if (auto f = group_line.find(g); f != group_line.end()) l = std::max(l, f->second);
    }
    return l;
  };
  const auto guard = [&](std::initializer_list<const char*> groups, auto&& fn) {
    try {
      fn();
    } catch (const invalid_parameter& e) {
      throw config_error(line_of(groups), e.what());
    }
  };
  guard({"element_count", "carrier", "spacing", "design_constant", "array_type", "bs_coverage"},
        [&] { validate(cfg.array); });
  guard({"beam_count", "element_count"}, [&] { hstbeam::detail::check_beam_count(cfg.array, cfg.beam_count); });
  guard({"max_beam_count", "element_count", "sigma", "p_th"}, [&] { validate(cfg.positioning, cfg.array); });
  guard({"d0", "h0", "theta_b"}, [&] { validate(cfg.rail); });
  guard({"L", "v0", "d0", "h0", "alpha0", "p0", "noise", "eta", "w1", "w2"}, [&] { validate(cfg.encounter); });
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error(0, "cannot open '" + path + "'");
  return parse_config(in);
}

/// Resolved values of every setting, in SI units, for manifests and --help.
inline std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& c) {
  const auto n = [](double v) { return csv::number(v); };
  const auto list = [&](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + n(v[i]);
    return s;
  };
  return {
      {"carrier_hz", n(c.carrier_hz)},
      {"wavelength_m", n(c.array.wavelength_m)},
      {"spacing_m", n(c.array.spacing_m)},
      {"element_count", std::to_string(c.array.element_count)},
      {"beam_count", std::to_string(c.beam_count)},
      {"design_constant", n(c.array.design_constant)},
      {"array_type", c.array.type == array_type::broadside ? "broadside" : "endfire"},
      {"bs_coverage_angle_rad", n(c.array.bs_coverage_angle_rad)},
      {"d0_m", n(c.rail.perpendicular_distance_m)},
      {"h0_m", n(c.rail.antenna_height_m)},
      {"theta_b_rad", n(c.rail.theta_b_rad)},
      {"sigma_m", n(c.positioning.error_stddev_m)},
      {"p_th", n(c.positioning.probability_threshold)},
      {"max_beam_count", std::to_string(c.positioning.max_beam_count)},
      {"half_coverage_m", n(c.encounter.half_coverage_m)},
      {"v0_mps", n(c.encounter.speed_mps)},
      {"path_loss_exponent", n(c.encounter.path_loss_exponent)},
      {"p0_w", n(c.encounter.power_w)},
      {"noise_w", n(c.encounter.noise_power_w)},
      {"eta", n(c.encounter.eta)},
      {"beam_weight_1", n(c.encounter.beam_weight_1)},
      {"beam_weight_2", n(c.encounter.beam_weight_2)},
      {"experiment", std::string(to_string(c.name))},
      {"tradeoff_points", std::to_string(c.tradeoff_points)},
      {"theta_points", std::to_string(c.theta_points)},
      {"sigma_grid_m", list(c.sigma_grid_m)},
      {"p_th_grid", list(c.p_th_grid)},
      {"eta_grid", list(c.eta_grid)},
      {"region_points", std::to_string(c.region_points)},
      {"symmetric_eta_points", std::to_string(c.symmetric_eta_points)},
      {"p0_dbm_grid", list(c.p0_dbm_grid)},
      {"traverse_step_s", n(c.traverse_step_s)},
      {"traverse_noisy", c.traverse_noisy ? "true" : "false"},
      {"seed", std::to_string(c.seed)},
      {"parallel", c.parallel ? "true" : "false"},
      {"output_dir", c.output_dir},
  };
}

}  // namespace hstbeam::harness
