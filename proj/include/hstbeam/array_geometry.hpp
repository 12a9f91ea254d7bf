// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hstbeam Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hstbeam/error.hpp"

namespace hstbeam {

inline constexpr double speed_of_light_mps = 299'792'458.0;

/// Half-power beamwidth constant of a uniform linear array.
inline constexpr double default_design_constant = 2.782;

enum class array_type : int {
  broadside = 2,
  endfire = 4,
};

inline constexpr double type_factor(array_type t) noexcept {
  return static_cast<double>(static_cast<int>(t));
}

inline double wavelength_from_frequency(double carrier_hz) {
  detail::require(carrier_hz > 0.0, "carrier frequency must be positive");
  return speed_of_light_mps / carrier_hz;
}

/// Uniform linear array mounted on the train roof, plus the angular
/// sector the serving BS needs covered.
struct ArrayConfig {
  int element_count = 128;
  double spacing_m = 0.0;
  double wavelength_m = 0.0;
  double design_constant = default_design_constant;
  array_type type = array_type::broadside;
  double bs_coverage_angle_rad = 0.0;

  static ArrayConfig half_wavelength(int elements, double carrier_hz) {
    ArrayConfig cfg;
    cfg.element_count = elements;
    cfg.wavelength_m = wavelength_from_frequency(carrier_hz);
    cfg.spacing_m = cfg.wavelength_m / 2.0;
    return cfg;
  }
};

/// Total angular coverage of all beams, C*lambda/(pi*d). Independent of N.
inline double total_coverage(const ArrayConfig& cfg) {
  return cfg.design_constant * cfg.wavelength_m / (std::numbers::pi * cfg.spacing_m);
}

inline void validate(const ArrayConfig& cfg) {
  detail::require(cfg.element_count >= 1, "element count must be >= 1");
  detail::require(cfg.spacing_m > 0.0 && std::isfinite(cfg.spacing_m), "element spacing must be positive");
  detail::require(cfg.wavelength_m > 0.0 && std::isfinite(cfg.wavelength_m), "wavelength must be positive");
  detail::require(cfg.design_constant > 0.0, "design constant must be positive");
  detail::require(cfg.type == array_type::broadside || cfg.type == array_type::endfire,
                  "array type factor must be 2 (broadside) or 4 (end-fire)");
  detail::require(cfg.bs_coverage_angle_rad >= 0.0, "BS coverage angle must be non-negative");
  detail::require(total_coverage(cfg) > cfg.bs_coverage_angle_rad,
                  "total beam coverage must exceed the BS coverage angle");
}

inline double coverage_start(const ArrayConfig& cfg) {
  return std::numbers::pi / 2.0 - total_coverage(cfg) / 2.0;
}

inline double coverage_end(const ArrayConfig& cfg) {
  return std::numbers::pi / 2.0 + total_coverage(cfg) / 2.0;
}

namespace detail {

inline void check_beam_count(const ArrayConfig& cfg, int beams) {
  require(beams >= 1, "beam count must be >= 1");
  require(beams <= cfg.element_count, "beam count must not exceed the element count");
}

}  // namespace detail

/// Array aperture spanned by N beams' worth of spacing, d*N.
///
/// Beamwidth and directivity both depend on (d, N) only through this
/// product, which is what makes (d, N) -> (s*d, N/s) an exact symmetry.
inline double aperture_length(const ArrayConfig& cfg, int beams) {
  return cfg.spacing_m * static_cast<double>(beams);
}

/// Half-power beamwidth of each of N beams, C*lambda/(pi*d*N).
inline double beamwidth(const ArrayConfig& cfg, int beams) {
  detail::check_beam_count(cfg, beams);
  return cfg.design_constant * cfg.wavelength_m / (std::numbers::pi * aperture_length(cfg, beams));
}

/// Directivity T*d*N/lambda. Valid when N*pi*d/lambda is large.
inline double directivity(const ArrayConfig& cfg, int beams) {
  detail::require(beams >= 1, "beam count must be >= 1");
  return type_factor(cfg.type) * aperture_length(cfg, beams) / cfg.wavelength_m;
}

/// Directivity reached by a beam of the given width: T*C/(pi*theta_h).
inline double directivity_from_beamwidth(array_type type, double design_constant, double beamwidth_rad) {
  detail::require(beamwidth_rad > 0.0, "beamwidth must be positive");
  return type_factor(type) * design_constant / (std::numbers::pi * beamwidth_rad);
}

/// One of the N equal angular cells partitioning the coverage sector.
struct BeamCell {
  int index = 0;       // 1-based, counted from the coverage start
  int offset = 0;      // floor((2*theta_b - pi) / (2*theta_h)), cells from boresight
  double lower_rad = 0.0;
  double upper_rad = 0.0;
  double beamwidth_rad = 0.0;
};

/// Locates the cell containing theta_b.
///
/// A theta_b on a shared boundary belongs to the higher-indexed cell; the
/// right coverage edge folds back into cell N. Positions within 1e-9 of a
/// cell width from a boundary snap onto it so the tie-break is stable
/// under rounding.
inline BeamCell beam_cell(double theta_b, const ArrayConfig& cfg, int beams) {
  validate(cfg);
  detail::check_beam_count(cfg, beams);
  const double half_pi = std::numbers::pi / 2.0;
  const double width = beamwidth(cfg, beams);
  double from_boresight = (theta_b - half_pi) / width;
  double from_start = from_boresight + static_cast<double>(beams) / 2.0;
  if (const double r = std::round(from_start); std::abs(from_start - r) < 1e-9) {
    from_boresight += r - from_start;
    from_start = r;
  }
  if (!(from_start >= 0.0 && from_start <= static_cast<double>(beams))) {
    throw out_of_coverage("theta_b = " + std::to_string(theta_b) + " rad lies outside coverage [" +
                          std::to_string(coverage_start(cfg)) + ", " + std::to_string(coverage_end(cfg)) + "]");
  }
  const int zero_based = std::clamp(static_cast<int>(std::floor(from_start)), 0, beams - 1);
  BeamCell cell;
  cell.index = zero_based + 1;
  cell.offset = static_cast<int>(std::floor(from_boresight));
  cell.beamwidth_rad = width;
  cell.lower_rad = half_pi + (static_cast<double>(zero_based) - static_cast<double>(beams) / 2.0) * width;
  cell.upper_rad = cell.lower_rad + width;
  return cell;
}

/// 1-based index of the beam whose cell contains theta_b, in [1, N].
inline int beam_index(double theta_b, const ArrayConfig& cfg, int beams) {
  return beam_cell(theta_b, cfg, beams).index;
}

/// Train/BS placement: perpendicular BS-to-rail distance, BS antenna
/// height and the angle of the BS seen from the array axis.
struct RailGeometry {
  double perpendicular_distance_m = 50.0;
  double antenna_height_m = 20.0;
  double theta_b_rad = std::numbers::pi / 2.0;
};

inline void validate(const RailGeometry& geo) {
  detail::require(geo.perpendicular_distance_m > 0.0, "perpendicular distance d0 must be positive");
  detail::require(geo.antenna_height_m >= 0.0, "antenna height h0 must be non-negative");
  detail::require(std::isfinite(geo.theta_b_rad), "theta_b must be finite");
}

struct RailBounds {
  double left_m = 0.0;   // towards the cell's lower-angle edge
  double right_m = 0.0;  // towards the cell's upper-angle edge
  double total_m = 0.0;
  BeamCell cell;
};

/// Distances from the BS to the two edges of its serving beam.
///
/// Each distance runs from the BS to the beam-edge ray leaving the array,
/// at slant range d0/sin(theta_b): d0*sin|theta_b - edge|/sin(theta_b)
/// while the angular gap is below a right angle. Both are non-negative
/// and their sum tends to d0*theta_h/sin(theta_b) as theta_h shrinks.
inline RailBounds beam_bounds_on_rail(const RailGeometry& geo, const ArrayConfig& cfg, int beams) {
  validate(geo);
  const double s = std::sin(geo.theta_b_rad);
  if (!(geo.theta_b_rad > 0.0 && geo.theta_b_rad < std::numbers::pi) || s <= 0.0) {
    throw singular_geometry("sin(theta_b) must be positive; the BS cannot lie on the array axis");
  }
  RailBounds out;
  out.cell = beam_cell(geo.theta_b_rad, cfg, beams);
  const double slant = geo.perpendicular_distance_m / s;
  // Point-to-ray distance: past a right angle the nearest ray point is the array itself.
  const auto to_edge = [slant](double angle) {
    return slant * std::sin(std::clamp(angle, 0.0, std::numbers::pi / 2.0));
  };
  out.left_m = to_edge(geo.theta_b_rad - out.cell.lower_rad);
  out.right_m = to_edge(out.cell.upper_rad - geo.theta_b_rad);
  out.total_m = out.left_m + out.right_m;
  return out;
}

}  // namespace hstbeam
